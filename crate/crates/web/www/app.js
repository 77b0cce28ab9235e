// Built with: wasm-pack build crates/web --target web --out-dir www/pkg
import init, { preview_profile, simulate_and_score, gold_demo } from "./pkg/traceqa_web.js";

const RATE_HZ = 10;

function fields(form) {
  return Object.fromEntries(new FormData(form).entries());
}

function call(fn, ...args) {
  try {
    return JSON.parse(fn(...args));
  } catch (e) {
    throw new Error(typeof e === "string" ? e : e.message);
  }
}

// Draws each series scaled to its own min..max.
function plot(canvas, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  for (const { values, color, width = 1.5 } of series) {
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const span = hi > lo ? hi - lo : 1;
    ctx.strokeStyle = color;
    ctx.lineWidth = width;
    ctx.beginPath();
    values.forEach((v, i) => {
      const x = (i / Math.max(values.length - 1, 1)) * (w - 8) + 4;
      const y = h - 4 - ((v - lo) / span) * (h - 8);
      i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.stroke();
  }
}

function report(el, text, isError = false) {
  el.textContent = text;
  el.classList.toggle("error", isError);
}

// --- 1. stimulus preview -------------------------------------------------

let preview = null;
let audio = null;

function renderPreview(form) {
  const f = fields(form);
  const info = document.getElementById("preview-info");
  try {
    preview = call(preview_profile, +f.seed, f.modality, Math.round(+f.duration * 1000), +f.segments, +f.hold);
  } catch (e) {
    report(info, e.message, true);
    return;
  }
  plot(document.getElementById("preview-plot"), [{ values: preview.levels, color: "#2a7" }]);
  const p = preview.profile;
  report(info, `${p.stimulus_id}: ${p.control_points.length} control points, ${p.duration_ms} ms, ` +
    (p.modality === "visual" ? "green channel 25..255" : "pitch 50..470 Hz"));
  setSwatch(0);
}

function setSwatch(i) {
  const swatch = document.getElementById("swatch");
  const g = preview && preview.profile.modality === "visual" ? preview.rendering[i] : 25;
  swatch.style.background = `rgb(20, ${g}, 12)`;
}

function play() {
  if (!preview) return;
  if (audio) {
    audio.stop();
    audio = null;
    return;
  }
  const dt = 1 / RATE_HZ;
  const n = preview.levels.length;
  if (preview.profile.modality === "auditory") {
    const ctx = new AudioContext();
    const osc = ctx.createOscillator();
    const gain = ctx.createGain();
    osc.type = "triangle";
    gain.gain.value = 0.2;
    preview.rendering.forEach((hz, i) => osc.frequency.setValueAtTime(hz, ctx.currentTime + i * dt));
    osc.connect(gain).connect(ctx.destination);
    osc.start();
    osc.stop(ctx.currentTime + n * dt);
    osc.onended = () => { ctx.close(); audio = null; };
    audio = { stop: () => osc.stop() };
  } else {
    const start = performance.now();
    let frame = 0;
    const tick = (now) => {
      const i = Math.floor((now - start) / 1000 / dt);
      if (!audio || i >= n) { audio = null; setSwatch(0); return; }
      setSwatch(i);
      frame = requestAnimationFrame(tick);
    };
    audio = { stop: () => cancelAnimationFrame(frame) };
    frame = requestAnimationFrame(tick);
  }
}

// --- 2. simulate and score ----------------------------------------------

function renderScore(form) {
  const f = fields(form);
  const info = document.getElementById("score-info");
  let r;
  try {
    r = call(simulate_and_score, +f.seed, f.kind, +f.lag, +f.noise, f.variant);
  } catch (e) {
    report(info, e.message, true);
    return;
  }
  for (const [id, pair] of [["score-visual", r.visual], ["score-auditory", r.auditory]]) {
    plot(document.getElementById(id), [
      { values: pair[0], color: "#999", width: 3 },
      { values: pair[1], color: "#c40" },
    ]);
  }
  report(info, `SDA visual ${r.sda_visual.toFixed(3)}, auditory ${r.sda_auditory.toFixed(3)}, ` +
    `mean ${r.mean_qa_sda.toFixed(3)} → ${r.label}`);
}

// --- 3. gold standard ----------------------------------------------------

function renderGold(form) {
  const f = fields(form);
  const body = document.querySelector("#gold-table tbody");
  body.innerHTML = "";
  let r;
  try {
    r = call(gold_demo, +f.seed, +f.diligent, +f.random);
  } catch (e) {
    body.innerHTML = `<tr><td colspan="2" class="error"></td></tr>`;
    body.querySelector("td").textContent = e.message;
    return;
  }
  plot(document.getElementById("gold-plot"), [
    ...r.members.map((m) => ({ values: m.trace, color: m.annotator.startsWith("random") ? "#e9b" : "#9bd", width: 1 })),
    { values: r.gold, color: "#024", width: 2.5 },
  ]);
  for (const m of r.members) {
    const row = body.insertRow();
    row.insertCell().textContent = m.annotator;
    row.insertCell().textContent = m.loo_sda.toFixed(3);
  }
}

await init();
const forms = {
  preview: renderPreview,
  score: renderScore,
  gold: renderGold,
};
for (const [id, render] of Object.entries(forms)) {
  const form = document.querySelector(`#${id} form`);
  form.addEventListener("submit", (e) => { e.preventDefault(); render(form); });
  render(form);
}
document.getElementById("play").addEventListener("click", play);
