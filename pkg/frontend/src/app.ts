/** Browser entry point: wires the socket, state, speech, and DOM together.
 *
 * Everything with logic worth testing lives in the sibling modules; this
 * file is the glue and the rendering. Role defaults to driver; append
 * ?role=observer to the page URL to watch a session someone else drives.
 */

import { EchoBuffer } from "./echo.js";
import { navForKey } from "./navKeys.js";
import type { ClientToServer, WireMessage } from "./protocol.js";
import { SpeechQueue, speakMessage } from "./speech.js";
import {
  applyMessage,
  initialState,
  markConnectionLost,
  renderedExtent,
  type ClientState,
  type RenderedObject,
} from "./state.js";

const state: ClientState = initialState();
const echo = new EchoBuffer();

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

const sceneCanvas = $("scene") as HTMLCanvasElement;
const logEl = $("log");
const inputEl = $("chat-input") as HTMLInputElement;
const statusEl = $("status");
const rateEl = $("speech-rate") as HTMLInputElement;
const echoEl = $("echo-enabled") as HTMLInputElement;
const contrastEl = $("high-contrast") as HTMLInputElement;
const fontEl = $("font-scale") as HTMLInputElement;

const synth = (text: string, rate: number): void => {
  const utterance = new SpeechSynthesisUtterance(text);
  utterance.rate = rate;
  window.speechSynthesis.speak(utterance);
};
const speech = new SpeechQueue(synth, state.settings);

const wsUrl = new URL("/stream", window.location.href);
wsUrl.protocol = wsUrl.protocol === "https:" ? "wss:" : "ws:";
const role = new URLSearchParams(window.location.search).get("role") ?? "driver";
wsUrl.searchParams.set("role", role);
const socket = new WebSocket(wsUrl);

function send(msg: ClientToServer): void {
  if (socket.readyState === WebSocket.OPEN) {
    socket.send(JSON.stringify(msg));
  }
}

socket.addEventListener("open", () => {
  state.connection = "open";
  render();
});

socket.addEventListener("message", (event: MessageEvent<string>) => {
  const msg = JSON.parse(event.data) as WireMessage;
  applyMessage(state, msg);
  speakMessage(speech, msg);
  if (state.needsResync) {
    send({ type: "snapshot" });
  }
  render();
});

socket.addEventListener("close", () => {
  markConnectionLost(state);
  speech.enqueue("Connection lost.");
  render();
});

inputEl.addEventListener("keydown", (event: KeyboardEvent) => {
  const spoken = echo.keystroke(event.key);
  if (state.settings.echoEnabled) {
    for (const text of spoken) speech.enqueue(text);
  }
  if (event.key === "Enter") {
    const text = echo.value.trim();
    echo.reset();
    inputEl.value = "";
    if (text) {
      state.transcript.push({ role: "user", text });
      send({ type: "user_input", text });
      render();
    }
    event.preventDefault();
  }
});

document.addEventListener("keydown", (event: KeyboardEvent) => {
  const focusInTextInput = document.activeElement === inputEl;
  const nav = navForKey(event.key, focusInTextInput);
  if (nav && role === "driver") {
    send(nav);
    event.preventDefault();
  }
});

rateEl.addEventListener("input", () => {
  state.settings.speechRate = Number(rateEl.value);
});
echoEl.addEventListener("change", () => {
  state.settings.echoEnabled = echoEl.checked;
});
contrastEl.addEventListener("change", () => {
  state.settings.highContrast = contrastEl.checked;
  document.body.classList.toggle("high-contrast", contrastEl.checked);
});
fontEl.addEventListener("input", () => {
  state.settings.fontScale = Number(fontEl.value);
  document.body.style.fontSize = `${state.settings.fontScale * 100}%`;
});

const METERS_TO_PIXELS = 24;

function drawObject(ctx: CanvasRenderingContext2D, obj: RenderedObject): void {
  const [w, , d] = renderedExtent(obj);
  const px = obj.position[0] * METERS_TO_PIXELS;
  const pz = obj.position[2] * METERS_TO_PIXELS;
  ctx.save();
  ctx.translate(px, -pz);
  ctx.rotate((-obj.yaw * Math.PI) / 180);
  ctx.fillStyle = obj.color ?? "#888888";
  ctx.globalAlpha = obj.physical ? 0.9 : 0.45;
  const rw = Math.max(w * METERS_TO_PIXELS, 4);
  const rd = Math.max(d * METERS_TO_PIXELS, 4);
  ctx.fillRect(-rw / 2, -rd / 2, rw, rd);
  ctx.globalAlpha = 1;
  ctx.rotate((obj.yaw * Math.PI) / 180);
  ctx.fillStyle = state.settings.highContrast ? "#ffffff" : "#222222";
  ctx.font = `${12 * state.settings.fontScale}px system-ui, sans-serif`;
  ctx.textAlign = "center";
  let label = obj.name;
  if (obj.audio) label += obj.audio.muted ? " [muted]" : " [sound]";
  if (obj.light) label += ` [light ${obj.light.intensity.toFixed(1)}]`;
  ctx.fillText(label, 0, -rd / 2 - 4);
  ctx.restore();
}

function render(): void {
  statusEl.textContent =
    state.connection === "lost"
      ? "connection lost"
      : `${state.sceneName || "connecting"} (v${state.version}, ${state.connection})`;

  const ctx = sceneCanvas.getContext("2d");
  if (ctx) {
    ctx.setTransform(1, 0, 0, 1, 0, 0);
    ctx.fillStyle = state.settings.highContrast ? "#000000" : "#f4f2ec";
    ctx.fillRect(0, 0, sceneCanvas.width, sceneCanvas.height);
    ctx.translate(sceneCanvas.width / 2, sceneCanvas.height / 2);
    // Camera follows the player: translate then counter-rotate by yaw.
    ctx.rotate((state.player.yaw * Math.PI) / 180);
    ctx.translate(
      -state.player.position[0] * METERS_TO_PIXELS,
      state.player.position[2] * METERS_TO_PIXELS,
    );
    for (const obj of state.objects.values()) {
      drawObject(ctx, obj);
    }
    ctx.setTransform(1, 0, 0, 1, sceneCanvas.width / 2, sceneCanvas.height / 2);
    ctx.fillStyle = "#c0392b";
    ctx.beginPath();
    ctx.moveTo(0, -8);
    ctx.lineTo(6, 8);
    ctx.lineTo(-6, 8);
    ctx.closePath();
    ctx.fill();
  }

  logEl.replaceChildren(
    ...state.transcript.slice(-50).map((line) => {
      const li = document.createElement("li");
      li.className = `line-${line.role}`;
      li.textContent = `${line.role}: ${line.text}`;
      return li;
    }),
  );
  logEl.scrollTop = logEl.scrollHeight;
}

render();
