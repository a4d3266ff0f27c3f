import init, { synthesize_gate, run_dj, fidelity_curve } from "./pkg/cavity_dj_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function model() {
  return {
    n: parseInt($("n").value, 10),
    eta: num("eta"),
    kappa: num("kappa"),
    delta: num("delta"),
    dipole: $("dipole").value,
  };
}

function report(id, fn) {
  const out = $(id);
  out.classList.remove("error");
  try {
    return fn(out);
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e);
  }
}

function bars(canvas, labels, values, lo, hi) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const y = (v) => h - 20 - ((v - lo) / (hi - lo)) * (h - 30);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(0, y(0));
  ctx.lineTo(w, y(0));
  ctx.stroke();
  const step = w / values.length;
  ctx.font = "11px monospace";
  values.forEach((v, k) => {
    ctx.fillStyle = v < 0 ? "#c44" : "#48c";
    const top = Math.min(y(v), y(0));
    ctx.fillRect(k * step + 4, top, step - 8, Math.abs(y(v) - y(0)));
    ctx.fillStyle = "#333";
    ctx.fillText(labels[k], k * step + 4, h - 4);
  });
}

function lines(canvas, xs, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const all = series.flatMap((s) => s.values);
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const span = hi - lo || 1;
  const xmax = xs[xs.length - 1] || 1;
  const px = (x) => 40 + (x / xmax) * (w - 50);
  const py = (v) => h - 25 - ((v - lo) / span) * (h - 40);
  ctx.font = "11px monospace";
  ctx.fillStyle = "#333";
  ctx.fillText(hi.toFixed(4), 0, 12);
  ctx.fillText(lo.toFixed(4), 0, h - 25);
  ctx.fillText(`kappa 0 .. ${xmax}`, w / 2 - 40, h - 6);
  series.forEach(({ values, color, name }, k) => {
    ctx.strokeStyle = color;
    ctx.beginPath();
    values.forEach((v, i) => (i ? ctx.lineTo(px(xs[i]), py(v)) : ctx.moveTo(px(xs[i]), py(v))));
    ctx.stroke();
    ctx.fillStyle = color;
    ctx.fillText(name, w - 160, 14 + 14 * k);
  });
}

function runGate() {
  report("gate-out", (out) => {
    const m = model();
    const g = JSON.parse(synthesize_gate(m.n, m.eta, m.kappa, m.delta, m.dipole, $("label").value.trim()));
    bars($("gate-plot"), g.inputs, g.re, -1, 1);
    const rows = g.inputs.map((x, k) => `${x}  ${g.re[k].toFixed(8)} ${g.im[k] >= 0 ? "+" : "-"} ${Math.abs(g.im[k]).toExponential(2)}i  leak ${g.leakage[k].toExponential(2)}`);
    out.textContent = `J_${g.label} (${g.atomic}), duration ${g.duration.toFixed(6)}\n` + rows.join("\n");
  });
}

function runDj() {
  report("dj-out", (out) => {
    const m = model();
    const r = JSON.parse(run_dj($("function").value.trim(), m.n, m.eta, m.kappa, m.delta, m.dipole, $("ideal").checked));
    const labels = r.probabilities.map((_, k) => k.toString(2).padStart(m.n, "0"));
    bars($("dj-plot"), labels, r.probabilities, 0, 1);
    out.textContent = [
      `f = ${r.function} (${r.class}), gates ${r.gates.join(" ") || "none"}`,
      `verdict ${r.classification}, p_zero ${r.p_zero.toFixed(6)}`,
      `fidelity raw ${r.fidelity_raw.toFixed(6)}, normalized ${r.fidelity_normalized.toFixed(6)}, leakage ${r.leakage.toExponential(3)}`,
    ].join("\n");
  });
}

function runCurve() {
  report("curve-out", (out) => {
    const m = model();
    const c = JSON.parse(fidelity_curve($("function").value.trim(), m.n, m.eta, num("kmax"), parseInt($("points").value, 10), m.delta, m.dipole));
    lines($("curve-plot"), c.kappa, [
      { values: c.fidelity_raw, color: "#48c", name: "fidelity (raw)" },
      { values: c.fidelity_normalized, color: "#c84", name: "fidelity (normalized)" },
    ]);
    const last = c.kappa.length - 1;
    out.textContent = `kappa = ${c.kappa[last]}: raw ${c.fidelity_raw[last].toFixed(6)}, normalized ${c.fidelity_normalized[last].toFixed(6)}`;
  });
}

await init();
$("gate-run").onclick = runGate;
$("dj-run").onclick = runDj;
$("curve-run").onclick = runCurve;
runGate();
runDj();
