import init, { analyze, localize, formation } from "./pkg/bearing_web.js";

const canvas = document.getElementById("board");
const ctx = canvas.getContext("2d");
const out = document.getElementById("out");
const SCALE = 80;
const R = 7;

let points = [[1, 1], [4, 1], [4, 4], [1, 4]];
let edges = [[0, 1], [1, 2], [2, 3], [3, 0]];
let anchors = [0, 1];
let target = null;
let overlay = null;
let selected = null;
let dragging = null;
let moved = false;
let animation = null;

const toCanvas = ([x, y]) => [40 + x * SCALE, canvas.height - 40 - y * SCALE];
const fromCanvas = (cx, cy) => [(cx - 40) / SCALE, (canvas.height - 40 - cy) / SCALE];
const scene = () => ({ points, edges, anchors });

function hit(cx, cy) {
  return points.findIndex((p) => {
    const [px, py] = toCanvas(p);
    return Math.hypot(px - cx, py - cy) <= R + 3;
  });
}

function arrow(from, d, color) {
  const [x0, y0] = toCanvas(from);
  const x1 = x0 + d[0] * SCALE;
  const y1 = y0 - d[1] * SCALE;
  ctx.strokeStyle = color;
  ctx.beginPath();
  ctx.moveTo(x0, y0);
  ctx.lineTo(x1, y1);
  ctx.stroke();
  const a = Math.atan2(y1 - y0, x1 - x0);
  ctx.beginPath();
  ctx.moveTo(x1, y1);
  ctx.lineTo(x1 - 8 * Math.cos(a - 0.4), y1 - 8 * Math.sin(a - 0.4));
  ctx.lineTo(x1 - 8 * Math.cos(a + 0.4), y1 - 8 * Math.sin(a + 0.4));
  ctx.closePath();
  ctx.fillStyle = color;
  ctx.fill();
}

function draw() {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.lineWidth = 2;
  ctx.strokeStyle = "#555";
  for (const [i, j] of edges) {
    const [a, b] = [toCanvas(points[i]), toCanvas(points[j])];
    ctx.beginPath();
    ctx.moveTo(...a);
    ctx.lineTo(...b);
    ctx.stroke();
  }
  if (overlay?.kind === "motion") {
    overlay.vectors.forEach((v, i) => v && arrow(points[i], [v[0] * 1.5, v[1] * 1.5], "#c0392b"));
  }
  if (overlay?.kind === "positions") {
    overlay.points.forEach((p) => {
      const [x, y] = toCanvas(p);
      ctx.strokeStyle = "#27ae60";
      ctx.strokeRect(x - R - 3, y - R - 3, 2 * R + 6, 2 * R + 6);
    });
  }
  points.forEach((p, i) => {
    const [x, y] = toCanvas(p);
    ctx.beginPath();
    ctx.arc(x, y, R, 0, 2 * Math.PI);
    ctx.fillStyle = anchors.includes(i) ? "#2c3e50" : i === selected ? "#f39c12" : "#3498db";
    ctx.fill();
    ctx.fillStyle = "#222";
    ctx.fillText(String(i + 1), x + R + 2, y - R);
  });
}

function show(value) {
  out.textContent = typeof value === "string" ? value : JSON.stringify(value, null, 2);
}

function call(fn, request) {
  try {
    return JSON.parse(fn(JSON.stringify(request)));
  } catch (e) {
    show(`error: ${e}`);
    return null;
  }
}

function toggleEdge(i, j) {
  const k = edges.findIndex(([a, b]) => (a === i && b === j) || (a === j && b === i));
  if (k >= 0) edges.splice(k, 1);
  else edges.push([i, j]);
}

canvas.addEventListener("mousedown", (e) => {
  const k = hit(e.offsetX, e.offsetY);
  moved = false;
  if (k >= 0) dragging = k;
});

canvas.addEventListener("mousemove", (e) => {
  if (dragging === null) return;
  moved = true;
  points[dragging] = fromCanvas(e.offsetX, e.offsetY);
  overlay = null;
  draw();
});

canvas.addEventListener("mouseup", (e) => {
  const k = hit(e.offsetX, e.offsetY);
  const wasDrag = dragging !== null && moved;
  dragging = null;
  if (wasDrag) return;
  overlay = null;
  if (k < 0) {
    points.push(fromCanvas(e.offsetX, e.offsetY));
    target = null;
  } else if (e.shiftKey) {
    anchors = anchors.includes(k) ? anchors.filter((a) => a !== k) : [...anchors, k];
  } else if (selected === null) {
    selected = k;
  } else {
    if (selected !== k) toggleEdge(selected, k);
    selected = null;
  }
  draw();
});

document.getElementById("analyze").onclick = () => {
  const r = call(analyze, scene());
  if (!r) return;
  overlay = r.witness ? { kind: "motion", vectors: r.witness } : null;
  show({ ...r, witness: r.witness ? "drawn in red" : null });
  draw();
};

document.getElementById("localize").onclick = () => {
  const r = call(localize, scene());
  if (!r) return;
  if (r.positions) overlay = { kind: "positions", points: r.positions };
  else if (r.motion) overlay = { kind: "motion", vectors: r.motion };
  show(r);
  draw();
};

document.getElementById("target").onclick = () => {
  target = points.map((p) => [...p]);
  show("Target saved. Move nodes, then run a formation law.");
};

document.getElementById("run").onclick = () => {
  if (!target) {
    show("Save a target layout first.");
    return;
  }
  const law = document.getElementById("law").value;
  const r = call(formation, { scene: { points, edges }, target, law, horizon: 20, frames: 200 });
  if (!r) return;
  cancelAnimationFrame(animation);
  let k = 0;
  const step = () => {
    points = r.frames[k];
    overlay = null;
    draw();
    show(`t = ${r.times[k].toFixed(2)}  bearing error = ${r.bearing_error[k].toExponential(3)}`);
    if (++k < r.frames.length) animation = requestAnimationFrame(step);
  };
  step();
};

document.getElementById("clear").onclick = () => {
  points = [];
  edges = [];
  anchors = [];
  target = null;
  overlay = null;
  selected = null;
  draw();
  show("");
};

await init();
show("Ready.");
draw();
