/** Wire protocol types, mirroring the server's JSON shapes verbatim. */

export type Vec3 = [number, number, number];

export interface WireMessage {
  type: string;
  seq: number;
  payload: unknown;
}

export interface TextFacetDoc {
  content: string;
  font_size: number;
}

export interface AudioFacetDoc {
  clip_id: string;
  volume?: number;
  pitch?: number;
  max_distance?: number;
  muted?: boolean;
  looping?: boolean;
}

export interface LightFacetDoc {
  kind: string;
  intensity: number;
  range?: number;
}

export interface SceneObjectDoc {
  id: string;
  name: string;
  description?: string;
  physical?: boolean;
  position?: Vec3;
  yaw?: number;
  scale?: Vec3;
  base_extent?: Vec3;
  parent?: string;
  tags?: string[];
  color?: string;
  annotated?: boolean;
  text?: TextFacetDoc;
  audio?: AudioFacetDoc;
  light?: LightFacetDoc;
}

export interface SceneDocument {
  format: number;
  name: string;
  ambient_light_intensity: number;
  player: { position: Vec3; yaw: number };
  objects: SceneObjectDoc[];
}

export interface SnapshotPayload {
  version: number;
  scene: SceneDocument;
}

/** One field change: [object id | "player" | "scene", dotted path, old, new]. */
export type DeltaEntry = [string, string, unknown, unknown];

export interface DeltaPayload {
  base_version: number;
  result_version: number;
  entries: DeltaEntry[];
  created_ids: string[];
}

export interface ReplyPayload {
  text: string;
}

export interface UtterancePayload {
  kind: string;
  text: string;
}

export interface ErrorPayload {
  reason: string;
}

export interface SsgDumpPayload {
  text: string;
}

export type ClientToServer =
  | { type: "snapshot" }
  | { type: "ssg_dump" }
  | { type: "user_input"; text: string }
  | { type: "nav"; kind: string; magnitude?: number };
