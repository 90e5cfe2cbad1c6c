import init, { zeros_sample, extremal_profile, sphere_zeros } from "./pkg/plurizero_web.js";

const $ = (id) => document.getElementById(id);

function planePlot(xy) {
  const c = $("plane"), g = c.getContext("2d");
  const s = c.width / 5, o = c.width / 2;
  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#bbb";
  g.beginPath(); g.arc(o, o, s, 0, 2 * Math.PI); g.stroke();
  g.beginPath(); g.moveTo(0, o); g.lineTo(c.width, o); g.moveTo(o, 0); g.lineTo(o, c.height); g.stroke();
  g.fillStyle = "#c0392b";
  let outside = 0, near = 0;
  for (let i = 0; i < xy.length; i += 2) {
    const r = Math.hypot(xy[i], xy[i + 1]);
    if (r > 2.5) outside++;
    if (Math.abs(r - 1) < 0.1) near++;
    g.fillRect(o + s * xy[i] - 1.5, o - s * xy[i + 1] - 1.5, 3, 3);
  }
  const n = xy.length / 2;
  $("plane-out").textContent = `${n} zeros, ${(100 * near / n).toFixed(1)}% within 0.1 of the unit circle, ${outside} off-screen`;
}

function sample() {
  try {
    const xy = zeros_sample($("law").value, +$("gamma").value, +$("n").value, BigInt($("seed").value));
    planePlot(xy);
  } catch (e) {
    $("plane-out").textContent = String(e);
  }
}

function profile() {
  const n = +$("pn").value;
  $("pn-val").textContent = n;
  const rows = extremal_profile($("kind").value, n, 3, 300);
  const c = $("profile"), g = c.getContext("2d");
  const pad = 30, w = c.width - 2 * pad, h = c.height - 2 * pad;
  let ymax = 0;
  for (let i = 0; i < rows.length; i += 3) ymax = Math.max(ymax, rows[i + 1], rows[i + 2]);
  const X = (r) => pad + (w * r) / 3, Y = (v) => c.height - pad - (h * v) / (ymax || 1);
  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, w, h);
  g.fillStyle = "#555";
  g.fillText("0", pad - 4, c.height - pad + 14);
  g.fillText("3", X(3) - 4, c.height - pad + 14);
  g.fillText(ymax.toFixed(2), 2, pad + 4);
  const curve = (k, color) => {
    g.strokeStyle = color;
    g.beginPath();
    for (let i = 0; i < rows.length; i += 3) {
      const x = X(rows[i]), y = Y(rows[i + k]);
      i ? g.lineTo(x, y) : g.moveTo(x, y);
    }
    g.stroke();
  };
  curve(2, "#2c3e50");
  curve(1, "#c0392b");
  g.fillStyle = "#c0392b"; g.fillText("(1/2n) log Γn", pad + 8, pad + 14);
  g.fillStyle = "#2c3e50"; g.fillText("extremal function", pad + 8, pad + 28);
}

let cloud = [], yaw = 0.6, pitch = 0.4;

function sphereDraw() {
  const c = $("sphere"), g = c.getContext("2d");
  const s = c.width * 0.42, o = c.width / 2;
  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#bbb";
  g.beginPath(); g.arc(o, o, s, 0, 2 * Math.PI); g.stroke();
  const [cy, sy, cp, sp] = [Math.cos(yaw), Math.sin(yaw), Math.cos(pitch), Math.sin(pitch)];
  for (const [x, y, z] of cloud) {
    const x1 = cy * x + sy * y, y1 = -sy * x + cy * y;
    const y2 = cp * y1 - sp * z, z2 = sp * y1 + cp * z;
    g.fillStyle = y2 < 0 ? "#c0392b" : "rgba(192,57,43,0.2)";
    g.fillRect(o + s * x1 - 1.5, o - s * z2 - 1.5, 3, 3);
  }
}

function sphere() {
  try {
    const n = +$("sn").value;
    const out = sphere_zeros(n, BigInt($("sseed").value));
    cloud = [];
    for (let i = 0; i < 3 * n; i += 3) cloud.push([out[i], out[i + 1], out[i + 2]]);
    let worst = 0;
    for (let i = 3 * n; i < out.length; i += 2) worst = Math.max(worst, Math.abs(out[i] - out[i + 1]));
    $("sphere-out").textContent = `${n} zeros; largest |cap mass − FS area| over 16 caps: ${worst.toFixed(4)}`;
    sphereDraw();
  } catch (e) {
    $("sphere-out").textContent = String(e);
  }
}

function dragRotate() {
  let last = null;
  const c = $("sphere");
  c.addEventListener("pointerdown", (e) => { last = [e.clientX, e.clientY]; c.setPointerCapture(e.pointerId); });
  c.addEventListener("pointerup", () => { last = null; });
  c.addEventListener("pointermove", (e) => {
    if (!last) return;
    yaw += (e.clientX - last[0]) * 0.01;
    pitch += (e.clientY - last[1]) * 0.01;
    last = [e.clientX, e.clientY];
    sphereDraw();
  });
}

await init();
$("sample").onclick = sample;
$("pn").oninput = profile;
$("kind").onchange = profile;
$("sphere-go").onclick = sphere;
dragRotate();
sample();
profile();
sphere();
