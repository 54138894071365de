import init, { bundled_scenarios, run, evaluate, focus } from "./pkg/parley_web.js";

const $ = (id) => document.getElementById(id);

function showTree(node, depth = 0) {
  const pad = "  ".repeat(depth);
  let line = `${pad}${node.prop}`;
  if (node.verdict) {
    line += `  ${node.verdict.outcome} ${node.verdict.support_score}/${node.verdict.attack_score}`;
    if (node.relationVerdict) line += `  (link ${node.relationVerdict.outcome})`;
  }
  if (node.step) line += `  [${node.step}] focus ${node.focus ? node.focus.join(", ") : "nil"}`;
  return [line, ...node.children.map((c) => showTree(c, depth + 1))].join("\n");
}

function call(title, f, render) {
  $("title").textContent = title;
  const out = $("out");
  out.classList.remove("err");
  try {
    out.textContent = render(JSON.parse(f($("scenario").value, Number($("tau").value))));
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e);
  }
}

await init();

const scenarios = JSON.parse(bundled_scenarios());
for (const s of scenarios) $("bundled").add(new Option(s.name, s.text));
$("scenario").value = scenarios[0].text;
$("bundled").onchange = (e) => { $("scenario").value = e.target.value; };
$("tau").oninput = (e) => { $("tau-value").textContent = e.target.value; };

$("run").onclick = () =>
  call("Transcript", run, (r) =>
    [...r.lines, "", `outcome: ${r.outcome}; depth ${r.depth}, rounds ${r.rounds}` +
      (r.ratified ? `, ratified ${r.ratified}` : ""), `${r.trace.length} trace records`].join("\n"));
$("evaluate").onclick = () => call("Evaluation (support/attack)", evaluate, (t) => showTree(t));
$("focus").onclick = () =>
  call("Candidate foci", focus, (t) => (t === null ? "The proposal is not rejected; nothing to modify." : showTree(t)));
