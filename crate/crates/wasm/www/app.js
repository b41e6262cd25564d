// Plain-ES-module frontend: all geometry work happens in the wasm module,
// this file only draws and wires up controls.

import init, {
  generate_instance,
  analyze_instance,
  measure_instance,
} from "../pkg/klee_wasm.js";

const $ = (id) => document.getElementById(id);
const canvas = $("view");
const ctx = canvas.getContext("2d");

let instance = null; // parsed instance object, always 2-D here
let dragStart = null;
let dragNow = null;

const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

function setStatus(message) {
  $("status").textContent = message ?? "";
}

// ---- coordinate mapping -------------------------------------------------

function viewBox() {
  // Fit the domain into the canvas with a small margin.
  const [x0, y0] = instance.domain.lo;
  const [x1, y1] = instance.domain.hi;
  const margin = 14;
  const w = canvas.width - 2 * margin;
  const h = canvas.height - 2 * margin;
  const scale = Math.min(w / (x1 - x0 || 1), h / (y1 - y0 || 1));
  return { x0, y0, x1, y1, scale, margin };
}

function toScreen(v, p) {
  return [
    v.margin + (p[0] - v.x0) * v.scale,
    canvas.height - v.margin - (p[1] - v.y0) * v.scale,
  ];
}

function toWorld(v, x, y) {
  return [
    v.x0 + (x - v.margin) / v.scale,
    v.y0 + (canvas.height - v.margin - y) / v.scale,
  ];
}

// ---- drawing ------------------------------------------------------------

function drawRect(v, lo, hi, fill, stroke) {
  const [ax, ay] = toScreen(v, lo);
  const [bx, by] = toScreen(v, hi);
  const x = Math.min(ax, bx), y = Math.min(ay, by);
  const w = Math.abs(bx - ax), h = Math.abs(by - ay);
  if (fill) { ctx.fillStyle = fill; ctx.fillRect(x, y, w, h); }
  if (stroke) { ctx.strokeStyle = stroke; ctx.strokeRect(x, y, w, h); }
}

function draw() {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!instance) return;
  const v = viewBox();
  drawRect(v, instance.domain.lo, instance.domain.hi, null, "#888");
  instance.boxes.forEach((b, i) => {
    const color = PALETTE[i % PALETTE.length];
    drawRect(v, b.lo, b.hi, color + "59", color);
  });
  if (dragStart && dragNow) {
    drawRect(v, dragStart, dragNow, "#8885", "#555");
  }
}

// ---- analysis and measurement -------------------------------------------

function refreshAnalysis() {
  if (!instance) return;
  try {
    const a = JSON.parse(analyze_instance(JSON.stringify(instance)));
    $("analysis").innerHTML = `
      <table>
        <tr><td>boxes (n)</td><td class="num">${a.n}</td></tr>
        <tr><td>maximal boxes (h)</td><td class="num">${a.h}</td></tr>
        <tr><td>profile (k)</td><td class="num">${a.k}</td></tr>
        <tr><td>quasi-profile (&kappa;)</td><td class="num">${a.kappa}</td></tr>
        <tr><td>per-axis stabbing</td><td class="num">[${a.per_dim.join(", ")}]</td></tr>
        <tr><td>components</td><td class="num">${a.components}</td></tr>
        <tr><td>heuristic width</td><td class="num">${a.heuristic_width}</td></tr>
      </table>`;
  } catch (err) {
    setStatus(err.message ?? String(err));
  }
}

function runOne(algo) {
  const t0 = performance.now();
  const report = JSON.parse(measure_instance(JSON.stringify(instance), algo));
  const ms = performance.now() - t0;
  return { algo, volume: report.volume, ms };
}

function runMeasure() {
  if (!instance) return;
  setStatus("");
  const choice = $("algo").value;
  const algos = choice === "all"
    ? ["sweep", "maxima", "profile", "treewidth", "combined", "oracle"]
    : [choice];
  const rows = [];
  for (const algo of algos) {
    try {
      rows.push(runOne(algo));
    } catch (err) {
      if (choice === "all") {
        rows.push({ algo, volume: null, note: err.message ?? String(err) });
      } else {
        setStatus(err.message ?? String(err));
        return;
      }
    }
  }
  $("result").innerHTML = `
    <table>
      <tr><th>algorithm</th><th class="num">volume</th><th class="num">time</th></tr>
      ${rows.map((r) => r.volume === null
        ? `<tr><td>${r.algo}</td><td colspan="2" class="hint">${r.note}</td></tr>`
        : `<tr><td>${r.algo}</td><td class="num">${r.volume}</td>
           <td class="num">${r.ms.toFixed(2)} ms</td></tr>`).join("")}
    </table>`;
}

// ---- controls -----------------------------------------------------------

function runGenerate() {
  setStatus("");
  const family = $("family").value;
  const n = Number($("n").value);
  const seed = Number($("seed").value);
  const needsParam = family === "dominated" || family === "stacked";
  const param = needsParam ? Number($("param").value) : undefined;
  try {
    instance = JSON.parse(generate_instance(family, n, 2, param, seed));
    $("result").innerHTML = "";
    draw();
    refreshAnalysis();
  } catch (err) {
    setStatus(err.message ?? String(err));
  }
}

function pointer(event) {
  const rect = canvas.getBoundingClientRect();
  const v = viewBox();
  return toWorld(v, event.clientX - rect.left, event.clientY - rect.top);
}

canvas.addEventListener("pointerdown", (event) => {
  if (!instance) return;
  canvas.setPointerCapture(event.pointerId);
  dragStart = pointer(event);
  dragNow = dragStart;
});

canvas.addEventListener("pointermove", (event) => {
  if (!dragStart) return;
  dragNow = pointer(event);
  draw();
});

canvas.addEventListener("pointerup", (event) => {
  if (!dragStart) return;
  const end = pointer(event);
  const lo = [Math.min(dragStart[0], end[0]), Math.min(dragStart[1], end[1])];
  const hi = [Math.max(dragStart[0], end[0]), Math.max(dragStart[1], end[1])];
  dragStart = dragNow = null;
  // Ignore accidental clicks; a real drag spans more than a pixel.
  const v = viewBox();
  if ((hi[0] - lo[0]) * v.scale > 1 && (hi[1] - lo[1]) * v.scale > 1) {
    instance.boxes.push({ lo, hi });
    refreshAnalysis();
    $("result").innerHTML = "";
  }
  draw();
});

$("family").addEventListener("change", () => {
  const family = $("family").value;
  $("param-label").hidden = !(family === "dominated" || family === "stacked");
});

$("generate").addEventListener("click", runGenerate);
$("measure").addEventListener("click", runMeasure);

await init();
runGenerate();
