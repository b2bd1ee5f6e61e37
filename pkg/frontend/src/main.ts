/** Ground-control panel wiring: session picker, map canvas, charts, controls. */

import { StripChart } from "./charts.js";
import { DragController } from "./drag.js";
import { drawScene } from "./render.js";
import { SceneModel } from "./scene.js";
import { SessionClient } from "./session.js";
import { ViewTransform } from "./transform.js";
import { ServerMsg } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function toast(text: string, kind: "info" | "error" = "info"): void {
  const box = el<HTMLDivElement>("toasts");
  const div = document.createElement("div");
  div.className = `toast ${kind}`;
  div.textContent = text;
  box.appendChild(div);
  setTimeout(() => div.remove(), 3500);
}

const scene = new SceneModel();
let client: SessionClient | null = null;
let drag: DragController | null = null;
let view: ViewTransform;
let fitted = false;

const errorChart = new StripChart([
  { key: "phi1", color: "#6fb1ff", label: "phi1" },
  { key: "phi2", color: "#ffb46f", label: "phi2" },
  { key: "e_path", color: "#78d67a", label: "e_path" },
]);
const speedChart = new StripChart([
  { key: "v_ref", color: "#d64545", label: "v_ref" },
  { key: "v_raw", color: "#6fb1ff", label: "v" },
  { key: "v_filtered", color: "#b98cff", label: "v_filt" },
]);

function canvasCtx(id: string): CanvasRenderingContext2D {
  const canvas = el<HTMLCanvasElement>(id);
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");
  return ctx;
}

function statusLine(): void {
  const r = scene.record;
  el<HTMLSpanElement>("status").textContent =
    `${scene.sessionId || "-"} | ${scene.mode} | step ${scene.step}` +
    (r ? ` | t=${r.t.toFixed(2)}s w=${r.w.toFixed(3)} v=${r.v.toFixed(2)}m/s ` +
         `e_path=${r.e_path.toFixed(3)}m u_v=${r.u_v.toFixed(0)}` : "");
}

let framePending = false;
function requestFrame(): void {
  if (framePending) return;
  framePending = true;
  requestAnimationFrame(() => {
    framePending = false;
    const ctx = canvasCtx("map");
    if (!fitted && scene.points.length > 0) {
      view.fitBounds(scene.points.map((p) => ({ x: p.x, y: p.y })));
      fitted = true;
    }
    drawScene(ctx, scene, view, {
      showHulls: el<HTMLInputElement>("show-hulls").checked,
      showArrows: el<HTMLInputElement>("show-arrows").checked,
    });
    const ec = el<HTMLCanvasElement>("chart-errors");
    errorChart.draw(canvasCtx("chart-errors"), ec.width, ec.height);
    const sc = el<HTMLCanvasElement>("chart-speed");
    speedChart.draw(canvasCtx("chart-speed"), sc.width, sc.height);
    statusLine();
  });
}

let arrowCooldown = 0;

function onMessage(msg: ServerMsg): void {
  scene.apply(msg);
  if (msg.type === "record") {
    const r = msg.record;
    errorChart.push(r.t, [r.phi1, r.phi2, r.e_path]);
    speedChart.push(r.t, [r.v_ref, r.v_raw, r.v_filtered]);
    if (el<HTMLInputElement>("show-arrows").checked && client) {
      arrowCooldown -= 1;
      if (arrowCooldown <= 0) {
        arrowCooldown = 25;
        const half = 0.55 * Math.max(view.width, view.height) / view.scale;
        client.commandNoWait({
          kind: "field_request",
          bbox: [view.cx - half, view.cy - half, view.cx + half, view.cy + half],
          res: 18,
        });
      }
    }
  }
  if (msg.type === "snapshot") {
    fitted = false;
    errorChart.clear();
    speedChart.clear();
    el<HTMLInputElement>("multiplier").value = String(msg.multiplier);
    el<HTMLInputElement>("k-theta").value = String(msg.guidance.k_theta);
    el<HTMLInputElement>("v-min").value = String(msg.setpoint.v_min);
    el<HTMLInputElement>("v-max").value = String(msg.setpoint.v_max);
    el<HTMLInputElement>("c-kappa").value = String(msg.setpoint.c_kappa);
    for (const w of msg.warnings) toast(w, "info");
  }
  if (msg.type === "gap") {
    toast(`stream gap: ${msg.dropped} records dropped`, "info");
  }
  if (msg.type === "error" && !msg.id) {
    toast(msg.reason, "error");
  }
  requestFrame();
}

function connect(sessionId: string): void {
  if (client) client.close();
  const proto = location.protocol === "https:" ? "wss" : "ws";
  const socket = new WebSocket(`${proto}://${location.host}/sessions/${sessionId}/stream`);
  const wrapped = {
    send: (d: string) => socket.send(d),
    close: () => socket.close(),
    onmessage: null as ((ev: { data: string }) => void) | null,
    onclose: null as (() => void) | null,
    onerror: null as ((ev: unknown) => void) | null,
  };
  socket.onmessage = (ev) => wrapped.onmessage && wrapped.onmessage({ data: String(ev.data) });
  socket.onclose = () => wrapped.onclose && wrapped.onclose();
  socket.onerror = (ev) => wrapped.onerror && wrapped.onerror(ev);
  client = new SessionClient(wrapped);
  client.onMessage = onMessage;
  client.onClose = () => toast("stream closed", "error");
  drag = new DragController(scene, client, {
    onLockedAttempt: (p) =>
      toast(`point (${p.segment}, ${p.index}) is locked by joint continuity`, "info"),
    onRejected: (p, reason) => {
      toast(reason, "error");
      requestFrame();
    },
    onMoved: () => requestFrame(),
  });
}

async function refreshSessions(): Promise<void> {
  const res = await fetch("/sessions");
  const data = (await res.json()) as { sessions: { id: string; mode: string }[] };
  const select = el<HTMLSelectElement>("session-list");
  select.innerHTML = "";
  for (const s of data.sessions) {
    const opt = document.createElement("option");
    opt.value = s.id;
    opt.textContent = `${s.id} (${s.mode})`;
    select.appendChild(opt);
  }
}

async function createSession(): Promise<void> {
  let scenario: unknown;
  try {
    scenario = JSON.parse(el<HTMLTextAreaElement>("scenario-box").value);
  } catch (exc) {
    toast(`scenario is not valid JSON: ${exc}`, "error");
    return;
  }
  const res = await fetch("/sessions", {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(scenario),
  });
  if (!res.ok) {
    const body = await res.json();
    const detail = body.errors
      ? body.errors.map((e: { path: string; message: string }) => `${e.path}: ${e.message}`).join("; ")
      : res.statusText;
    toast(`rejected: ${detail}`, "error");
    return;
  }
  const status = await res.json();
  await refreshSessions();
  el<HTMLSelectElement>("session-list").value = status.id;
  connect(status.id);
}

function sendSimple(kind: "pause" | "resume" | "reset"): void {
  if (!client) return;
  client.command({ kind }).then((out) => {
    if (!out.ok) toast(out.error?.reason ?? "rejected", "error");
  });
}

function setupControls(): void {
  el<HTMLButtonElement>("btn-refresh").onclick = () => refreshSessions();
  el<HTMLButtonElement>("btn-connect").onclick = () => {
    const sid = el<HTMLSelectElement>("session-list").value;
    if (sid) connect(sid);
  };
  el<HTMLButtonElement>("btn-create").onclick = () => createSession();
  el<HTMLButtonElement>("btn-pause").onclick = () => sendSimple("pause");
  el<HTMLButtonElement>("btn-resume").onclick = () => sendSimple("resume");
  el<HTMLButtonElement>("btn-reset").onclick = () => sendSimple("reset");
  el<HTMLInputElement>("multiplier").onchange = (ev) => {
    const value = parseFloat((ev.target as HTMLInputElement).value);
    if (client && Number.isFinite(value) && value > 0) {
      client.command({ kind: "set_speed_multiplier", value });
    }
  };
  el<HTMLButtonElement>("btn-gains").onclick = () => {
    if (!client) return;
    client
      .command({
        kind: "set_guidance_gains",
        k1: scene.guidance.k1,
        k2: scene.guidance.k2,
        k_theta: parseFloat(el<HTMLInputElement>("k-theta").value),
      })
      .then((out) => {
        if (!out.ok) toast(out.error?.reason ?? "rejected", "error");
        else toast("guidance gains updated");
      });
  };
  el<HTMLButtonElement>("btn-speed").onclick = () => {
    if (!client) return;
    client
      .command({
        kind: "set_speed_params",
        v_min: parseFloat(el<HTMLInputElement>("v-min").value),
        v_max: parseFloat(el<HTMLInputElement>("v-max").value),
        c_kappa: parseFloat(el<HTMLInputElement>("c-kappa").value),
      })
      .then((out) => {
        if (!out.ok) toast(out.error?.reason ?? "rejected", "error");
        else toast("speed setpoint updated");
      });
  };
  el<HTMLInputElement>("show-hulls").onchange = () => requestFrame();
  el<HTMLInputElement>("show-arrows").onchange = () => requestFrame();
}

function setupCanvas(): void {
  const canvas = el<HTMLCanvasElement>("map");
  view = new ViewTransform(canvas.width, canvas.height);
  let panning = false;
  let lastX = 0;
  let lastY = 0;

  canvas.addEventListener("pointerdown", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const px = ev.clientX - rect.left;
    const py = ev.clientY - rect.top;
    const hit = scene.hitTest(px, py, (x, y) => view.worldToScreen(x, y));
    if (hit && drag && drag.begin(hit.point)) {
      canvas.setPointerCapture(ev.pointerId);
      return;
    }
    panning = true;
    lastX = px;
    lastY = py;
    canvas.setPointerCapture(ev.pointerId);
  });
  canvas.addEventListener("pointermove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const px = ev.clientX - rect.left;
    const py = ev.clientY - rect.top;
    if (drag && drag.dragging) {
      const world = view.screenToWorld(px, py);
      drag.move(world.x, world.y);
      requestFrame();
      return;
    }
    if (panning) {
      view.panPixels(px - lastX, py - lastY);
      lastX = px;
      lastY = py;
      requestFrame();
    }
  });
  const finish = () => {
    if (drag) drag.end();
    panning = false;
    requestFrame();
  };
  canvas.addEventListener("pointerup", finish);
  canvas.addEventListener("pointercancel", () => {
    if (drag) drag.cancel();
    panning = false;
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    const rect = canvas.getBoundingClientRect();
    view.zoomAt(ev.clientX - rect.left, ev.clientY - rect.top, ev.deltaY < 0 ? 1.15 : 1 / 1.15);
    requestFrame();
  });
}

async function boot(): Promise<void> {
  setupCanvas();
  setupControls();
  try {
    const res = await fetch("default-scenario.json");
    if (res.ok) {
      el<HTMLTextAreaElement>("scenario-box").value = JSON.stringify(await res.json(), null, 2);
    }
  } catch {
    /* the paste box still works without a default */
  }
  await refreshSessions().catch(() => toast("service unreachable", "error"));
}

window.addEventListener("load", () => {
  void boot();
});
