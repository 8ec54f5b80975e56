import init, { learnerRun, identifyRun, convertView } from "./pkg/rirl_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const list = (text) => text.split(",").map((s) => parseFloat(s.trim())).filter((v) => !Number.isNaN(v));

function show(id, fn) {
  try {
    fn();
  } catch (e) {
    $(id).textContent = String(e);
  }
}

// ellipsoid learner
let run = null;

function drawFrame(i) {
  const ctx = $("lcanvas").getContext("2d");
  const size = 420, scale = size / 5; // view [-2.5, 2.5]^2
  const px = (x) => size / 2 + x * scale;
  const py = (y) => size / 2 - y * scale;
  ctx.clearRect(0, 0, size, size);
  ctx.strokeStyle = "#bbb";
  ctx.strokeRect(px(-1), py(1), 2 * scale, 2 * scale);
  for (let k = Math.max(0, i - 8); k <= i; k++) {
    const e = run.frames[k].ellipse;
    ctx.beginPath();
    ctx.ellipse(px(e.center[0]), py(e.center[1]), e.axes[0] * scale, e.axes[1] * scale, -e.angle, 0, 2 * Math.PI);
    ctx.strokeStyle = k === i ? "#27c" : "rgba(34, 119, 204, 0.2)";
    ctx.stroke();
  }
  const c = run.frames[i].ellipse.center;
  ctx.fillStyle = "#27c";
  ctx.fillRect(px(c[0]) - 3, py(c[1]) - 3, 6, 6);
  ctx.fillStyle = "#c33";
  ctx.beginPath();
  ctx.arc(px(run.theta[0]), py(run.theta[1]), 4, 0, 2 * Math.PI);
  ctx.fill();
  const seen = run.frames.slice(0, i + 1).filter((f) => f.mistake).length;
  $("linfo").textContent =
    `round ${i}: mistakes so far ${seen} (total ${run.mistakes}, bound ${run.mistake_bound.toFixed(1)})\n` +
    `center (${c[0].toFixed(4)}, ${c[1].toFixed(4)})`;
}

$("lrun").onclick = () => show("linfo", () => {
  run = JSON.parse(learnerRun(num("tx"), num("ty"), num("le"), num("lr") | 0, num("ls") | 0, $("ladv").checked));
  $("lslider").max = run.frames.length - 1;
  $("lslider").value = run.frames.length - 1;
  drawFrame(run.frames.length - 1);
});
$("lslider").oninput = () => run && drawFrame(parseInt($("lslider").value));

// identification
let ident = null;

function drawIntervals(k) {
  const rows = ident.history[k].map(([lo, hi], s) => {
    const left = ((lo + 1) / 2) * 100, width = Math.max(((hi - lo) / 2) * 100, 0.3);
    const truth = ((ident.theta[s] + 1) / 2) * 100;
    return `<div class="track"><div class="bar" style="left:${left}%;width:${width}%"></div>` +
      `<div class="truth" style="left:${truth}%"></div></div>`;
  });
  $("ibars").innerHTML = rows.join("");
  $("iinfo").textContent = `after ${k} of ${ident.tasks_used} tasks\nestimate ${ident.theta_hat.map((v) => v.toFixed(4)).join(", ")}`;
}

$("irun").onclick = () => show("iinfo", () => {
  ident = JSON.parse(identifyRun(new Float64Array(list($("it").value)), num("ie"), 0.9));
  $("islider").max = ident.history.length - 1;
  $("islider").value = ident.history.length - 1;
  drawIntervals(ident.history.length - 1);
});
$("islider").oninput = () => ident && drawIntervals(parseInt($("islider").value));

// conversion
$("crun").onclick = () => show("cinfo", () => {
  const view = JSON.parse(convertView($("cx").value, new Float64Array(list($("cr").value)), num("cg")));
  const fmt = (row) => row.map((v) => v.toFixed(4)).join("  ");
  $("cinfo").textContent =
    `spread(X) = ${view.spread.toFixed(6)}\n\n` +
    "transitions out of the reference state, one row per action:\n" +
    view.reference_rows.map(fmt).join("\n") +
    "\n\noccupancy of each emulating policy (reference state first):\n" +
    view.occupancies.map(fmt).join("\n") +
    `\n\nround-trip error ${view.round_trip_error.toExponential(2)}`;
});

await init();
