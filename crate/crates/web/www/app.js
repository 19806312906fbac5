import init, { score_hypothesis, explore_weights, directions, corpus } from "./pkg/datscore_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (x) => x.toFixed(4);

function el(tag, text, attrs = {}) {
  const e = document.createElement(tag);
  if (text !== undefined) e.textContent = text;
  Object.assign(e, attrs);
  return e;
}

function table(header, rows) {
  const t = el("table");
  const head = el("tr");
  header.forEach((h) => head.append(el("th", h)));
  t.append(head);
  rows.forEach((r) => {
    const tr = el("tr");
    r.forEach((c) => tr.append(c instanceof Node ? wrap(c) : el("td", c)));
    t.append(tr);
  });
  return t;
}

function wrap(node) {
  const td = el("td");
  td.append(node);
  return td;
}

function bar(weight) {
  const span = el("span", "", { className: "bar" });
  span.style.width = `${Math.round(weight * 300)}px`;
  return span;
}

function tokens(d) {
  const div = el("div", undefined, { className: "tokens" });
  d.tokens.forEach((tok, i) => {
    const p = Math.exp(d.logprobs[i]);
    const s = el("span", tok, { title: `logprob ${fmt(d.logprobs[i])}, entropy ${fmt(d.entropies[i])}` });
    s.style.background = `rgba(70, 160, 110, ${Math.min(1, p * 4)})`;
    div.append(s);
  });
  return div;
}

function runScore() {
  const out = $("score-out");
  out.replaceChildren();
  try {
    const r = JSON.parse(score_hypothesis(
      $("src").value, $("src-lang").value, $("ref").value, $("hyp").value, $("tgt-lang").value, $("terms").value,
    ));
    out.append(el("p", `Trans1 (${r.trans1.lang}): ${r.trans1.text}`));
    out.append(el("p", `Trans2 (${r.trans2.lang}): ${r.trans2.text}`));
    out.append(table(
      ["direction", "score", "weight", "", "tokens"],
      r.directions.map((d) => [d.direction, fmt(d.score), fmt(d.weight), bar(d.weight), tokens(d)]),
    ));
    out.append(el("p", `DATScore ${fmt(r.datscore)} (uniform average ${fmt(r.uniform_average)}, weights: ${r.weight_provenance})`));
  } catch (e) {
    out.append(el("p", String(e), { className: "err" }));
  }
}

function runExplore() {
  const out = $("explore-out");
  out.replaceChildren();
  try {
    const r = JSON.parse(explore_weights(
      Number($("n").value), Number($("noise").value), $("outlier").value, BigInt($("seed").value || 0),
    ));
    const ovr = r["one-vs-rest"];
    out.append(el("p", `Kendall tau-like: one-vs-rest ${fmt(ovr.tau)}, uniform ${fmt(r.uniform.tau)}`));
    out.append(table(["direction", "weight", ""], ovr.weights.map((w) => [w.direction, fmt(w.weight), bar(w.weight)])));
    if (ovr.provenance !== "one-vs-rest") out.append(el("p", "all weights clamped to zero; fell back to uniform"));
  } catch (e) {
    out.append(el("p", String(e), { className: "err" }));
  }
}

await init();
JSON.parse(directions()).forEach((d) => $("outlier").append(el("option", d, { value: d })));
$("outlier").value = "trans1->hypo";
JSON.parse(corpus()).forEach((row) => {
  const tr = el("tr");
  row.forEach((s) => tr.append(el("td", s)));
  $("corpus").append(tr);
});
$("noise").addEventListener("input", () => { $("noise-val").textContent = $("noise").value; });
$("score").addEventListener("click", runScore);
$("explore").addEventListener("click", runExplore);
runScore();
runExplore();
