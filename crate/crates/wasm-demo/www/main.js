import init, { randomInstance, alphaCurve, sandwich, corollary } from "./pkg/ncinterp_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(id, text, error = false) {
  $(id).textContent = text;
  $(id).className = error ? "err" : "";
}

function run(out, f) {
  try {
    f();
  } catch (e) {
    show(out, String(e.message ?? e), true);
  }
}

// series: [{ xs, ys, color, dots }]; hlines: [{ y, color }]
function plot(canvas, series, hlines = []) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const xs = series.flatMap((s) => s.xs);
  const ys = series.flatMap((s) => s.ys).concat(hlines.map((l) => l.y));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const margin = (y1 - y0) * 0.08 || Math.abs(y1) * 0.05 || 1;
  y0 -= margin;
  y1 += margin;
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad + ((y0 - y) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(y1.toPrecision(5), 2, pad + 4);
  ctx.fillText(y0.toPrecision(5), 2, h - pad);
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(3), w - pad - 20, h - pad + 14);

  for (const l of hlines) {
    ctx.strokeStyle = l.color;
    ctx.setLineDash([5, 4]);
    ctx.beginPath();
    ctx.moveTo(pad, py(l.y));
    ctx.lineTo(w - pad, py(l.y));
    ctx.stroke();
  }
  ctx.setLineDash([]);
  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.dots) {
      s.xs.forEach((x, i) => ctx.fillRect(px(x) - 1.5, py(s.ys[i]) - 1.5, 3, 3));
    } else {
      ctx.beginPath();
      s.xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]))));
      ctx.stroke();
    }
  }
}

function generate() {
  run("curve-out", () => {
    const x = JSON.parse(randomInstance(num("d"), num("n"), num("seed")));
    $("tuple").value = JSON.stringify(x);
  });
}

function curve() {
  run("curve-out", () => {
    const r = JSON.parse(alphaCurve($("tuple").value, $("curve-p").value, num("curve-steps")));
    plot($("curve-plot"), [{ xs: r.thetas, ys: r.alpha, color: "#1f5fbf" }], [
      { y: r.column, color: "#2a9d3a" },
      { y: r.row, color: "#c0392b" },
    ]);
    show("curve-out", `column norm ${r.column}\nrow norm    ${r.row}\nalpha at theta=1/2 ${r.alpha[Math.floor(r.alpha.length / 2)]}`);
  });
}

function runSandwich() {
  show("sw-out", "running...");
  setTimeout(() =>
    run("sw-out", () => {
      const r = JSON.parse(
        sandwich($("tuple").value, $("sw-p").value, num("sw-theta"), num("sw-degree"), num("sw-samples")),
      );
      const side = (row) => r.profile.filter((q) => q.row_side === row);
      const col = side(false);
      const rowSide = side(true);
      plot(
        $("sw-plot"),
        [
          { xs: col.map((q) => q.angle), ys: col.map((q) => q.norm), color: "#2a9d3a", dots: true },
          { xs: rowSide.map((q) => q.angle), ys: rowSide.map((q) => q.norm), color: "#c0392b", dots: true },
        ],
        [
          { y: r.lower, color: "#888" },
          { y: r.alpha, color: "#1f5fbf" },
          { y: r.upper, color: "#000" },
        ],
      );
      show(
        "sw-out",
        `lower ${r.lower}\nalpha ${r.alpha}\nupper ${r.upper}\nrelative gap ${(100 * r.relative_gap).toFixed(3)}%`,
      );
    }),
  );
}

function runCorollary() {
  run("co-out", () => {
    const r = JSON.parse(corollary($("tuple").value, num("co-theta")));
    show(
      "co-out",
      `alpha_(inf,theta)^2      ${r.alpha_squared}\n||T|| on L_${r.p.toFixed(4)}  ${r.superoperator}\nrelative deviation       ${r.deviation.toExponential(3)}`,
    );
  });
}

await init();
$("gen").onclick = generate;
$("curve").onclick = curve;
$("sw").onclick = runSandwich;
$("co").onclick = runCorollary;
generate();
curve();
