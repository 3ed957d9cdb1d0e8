/** Client-side scene state: a reducer over incoming wire messages.
 *
 * The invariant the tests pin down: replaying a snapshot plus every delta
 * received after it yields exactly the scene a fresh snapshot would report.
 * Anything the reducer cannot apply faithfully flips `needsResync` so the
 * owner can request a fresh snapshot instead of drifting.
 */

import type {
  DeltaEntry,
  DeltaPayload,
  ErrorPayload,
  ReplyPayload,
  SceneObjectDoc,
  SnapshotPayload,
  UtterancePayload,
  Vec3,
  WireMessage,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "lost";

export interface TextFacet {
  content: string;
  fontSize: number;
}

export interface AudioFacet {
  clipId: string;
  volume: number;
  pitch: number;
  maxDistance: number;
  muted: boolean;
  looping: boolean;
}

export interface LightFacet {
  kind: string;
  intensity: number;
  range: number | null;
}

export interface RenderedObject {
  id: string;
  name: string;
  description: string;
  physical: boolean;
  position: Vec3;
  yaw: number;
  scale: Vec3;
  baseExtent: Vec3;
  parent: string | null;
  tags: string[];
  color: string | null;
  text: TextFacet | null;
  audio: AudioFacet | null;
  light: LightFacet | null;
}

export interface TranscriptLine {
  role: "user" | "assistant" | "system";
  text: string;
}

export interface Settings {
  speechRate: number;
  echoEnabled: boolean;
  highContrast: boolean;
  fontScale: number;
}

export interface ClientState {
  connection: ConnectionStatus;
  version: number;
  sceneName: string;
  ambient: number;
  player: { position: Vec3; yaw: number };
  objects: Map<string, RenderedObject>;
  transcript: TranscriptLine[];
  pendingInput: string;
  needsResync: boolean;
  lastSeq: number;
  settings: Settings;
}

export const DEFAULT_SETTINGS: Settings = {
  speechRate: 1.0,
  echoEnabled: true,
  highContrast: false,
  fontScale: 1.0,
};

export function initialState(): ClientState {
  return {
    connection: "connecting",
    version: -1,
    sceneName: "",
    ambient: 0,
    player: { position: [0, 0, 0], yaw: 0 },
    objects: new Map(),
    transcript: [],
    pendingInput: "",
    needsResync: false,
    lastSeq: 0,
    settings: { ...DEFAULT_SETTINGS },
  };
}

function toRendered(doc: SceneObjectDoc): RenderedObject {
  return {
    id: doc.id,
    name: doc.name,
    description: doc.description ?? "",
    physical: doc.physical ?? true,
    position: [...(doc.position ?? [0, 0, 0])] as Vec3,
    yaw: doc.yaw ?? 0,
    scale: [...(doc.scale ?? [1, 1, 1])] as Vec3,
    baseExtent: [...(doc.base_extent ?? [1, 1, 1])] as Vec3,
    parent: doc.parent ?? null,
    tags: [...(doc.tags ?? [])],
    color: doc.color ?? null,
    text: doc.text
      ? { content: doc.text.content, fontSize: doc.text.font_size }
      : null,
    audio: doc.audio
      ? {
          clipId: doc.audio.clip_id,
          volume: doc.audio.volume ?? 1,
          pitch: doc.audio.pitch ?? 1,
          maxDistance: doc.audio.max_distance ?? 10,
          muted: doc.audio.muted ?? false,
          looping: doc.audio.looping ?? true,
        }
      : null,
    light: doc.light
      ? {
          kind: doc.light.kind,
          intensity: doc.light.intensity,
          range: doc.light.range ?? null,
        }
      : null,
  };
}

/** Footprint the scene view draws: base extent scaled per axis. */
export function renderedExtent(obj: RenderedObject): Vec3 {
  return [
    obj.baseExtent[0] * obj.scale[0],
    obj.baseExtent[1] * obj.scale[1],
    obj.baseExtent[2] * obj.scale[2],
  ];
}

function applySnapshot(state: ClientState, payload: SnapshotPayload): void {
  state.version = payload.version;
  state.sceneName = payload.scene.name;
  state.ambient = payload.scene.ambient_light_intensity;
  state.player = {
    position: [...payload.scene.player.position] as Vec3,
    yaw: payload.scene.player.yaw,
  };
  state.objects = new Map(
    payload.scene.objects.map((doc) => [doc.id, toRendered(doc)]),
  );
  state.needsResync = false;
}

/** Apply one delta entry; returns false when the client must resync instead. */
function applyEntry(state: ClientState, entry: DeltaEntry): boolean {
  const [objectId, path, , next] = entry;
  if (objectId === "player") {
    if (path === "position") {
      state.player.position = [...(next as Vec3)] as Vec3;
      return true;
    }
    if (path === "yaw") {
      state.player.yaw = next as number;
      return true;
    }
    return false;
  }
  if (objectId === "scene") {
    if (path === "ambient_light_intensity") {
      state.ambient = next as number;
      return true;
    }
    // Spawn bookkeeping has no rendered counterpart; created_ids drives resync.
    return path === "spawn_counter";
  }
  const obj = state.objects.get(objectId);
  if (!obj) return false;
  switch (path) {
    case "position":
      obj.position = [...(next as Vec3)] as Vec3;
      return true;
    case "yaw":
      obj.yaw = next as number;
      return true;
    case "scale":
      obj.scale = [...(next as Vec3)] as Vec3;
      return true;
    case "color":
      obj.color = next as string;
      return true;
    case "tags":
      obj.tags = [...(next as string[])];
      return true;
    case "name":
      obj.name = next as string;
      return true;
    case "text.content":
      if (!obj.text) return false;
      obj.text.content = next as string;
      return true;
    case "text.font_size":
      if (!obj.text) return false;
      obj.text.fontSize = next as number;
      return true;
    case "audio.volume":
      if (!obj.audio) return false;
      obj.audio.volume = next as number;
      return true;
    case "audio.pitch":
      if (!obj.audio) return false;
      obj.audio.pitch = next as number;
      return true;
    case "audio.max_distance":
      if (!obj.audio) return false;
      obj.audio.maxDistance = next as number;
      return true;
    case "audio.muted":
      if (!obj.audio) return false;
      obj.audio.muted = next as boolean;
      return true;
    case "light.intensity":
      if (!obj.light) return false;
      obj.light.intensity = next as number;
      return true;
    case "light.range":
      if (!obj.light) return false;
      obj.light.range = next as number | null;
      return true;
    default:
      return false;
  }
}

function applyDelta(state: ClientState, payload: DeltaPayload): void {
  for (const entry of payload.entries) {
    if (!applyEntry(state, entry)) {
      state.needsResync = true;
    }
  }
  if (payload.created_ids.length > 0) {
    // New objects arrive only via snapshot, never as delta entries.
    state.needsResync = true;
  }
  state.version = payload.result_version;
}

/**
 * Fold one server message into the state. Mutates and returns `state`.
 *
 * Transcript-only messages (reply, utterance, error) never touch scene
 * fields; speech is the caller's concern, see speech.ts.
 */
export function applyMessage(state: ClientState, msg: WireMessage): ClientState {
  if (msg.seq <= state.lastSeq) {
    // Out-of-order or replayed frame: the stream contract is broken.
    state.needsResync = true;
    return state;
  }
  state.lastSeq = msg.seq;
  switch (msg.type) {
    case "snapshot":
      applySnapshot(state, msg.payload as SnapshotPayload);
      break;
    case "scene_delta":
      applyDelta(state, msg.payload as DeltaPayload);
      break;
    case "reply":
      state.transcript.push({
        role: "assistant",
        text: (msg.payload as ReplyPayload).text,
      });
      break;
    case "utterance":
      state.transcript.push({
        role: "system",
        text: (msg.payload as UtterancePayload).text,
      });
      break;
    case "error":
      state.transcript.push({
        role: "system",
        text: `Error: ${(msg.payload as ErrorPayload).reason}`,
      });
      break;
    case "ssg_dump":
      break;
    default:
      state.needsResync = true;
  }
  return state;
}

/** The audible notice owed to the user when the socket drops. */
export const CONNECTION_LOST_NOTICE = "Connection lost.";

export function markConnectionLost(state: ClientState): ClientState {
  state.connection = "lost";
  state.transcript.push({ role: "system", text: CONNECTION_LOST_NOTICE });
  return state;
}

/** Canonical comparable form of the rendered scene, for sync checks. */
export interface CanonicalScene {
  version: number;
  name: string;
  ambient: number;
  player: { position: Vec3; yaw: number };
  objects: RenderedObject[];
}

export function canonicalScene(state: ClientState): CanonicalScene {
  const objects = [...state.objects.values()].sort((a, b) =>
    a.id < b.id ? -1 : a.id > b.id ? 1 : 0,
  );
  return {
    version: state.version,
    name: state.sceneName,
    ambient: state.ambient,
    player: {
      position: [...state.player.position] as Vec3,
      yaw: state.player.yaw,
    },
    objects,
  };
}

/** State a client would hold right after receiving `payload` as its first frame. */
export function stateFromSnapshot(payload: SnapshotPayload): ClientState {
  const state = initialState();
  state.connection = "open";
  applySnapshot(state, payload);
  return state;
}
