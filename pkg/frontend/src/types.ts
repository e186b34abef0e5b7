// Wire protocol v1 types, mirroring the server's JSON frames.

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number];

export interface FrameAxes {
  t: Vec3;
  x: Vec3;
  y: Vec3;
}

export interface HelloPayload {
  protocol_version: number;
  tick_hz: number;
}

export interface CanalPayload {
  N_f: number;
  directrix: Vec3[];
  radii: number[];
  mean_q: Quat[];
  sigma_q: number[];
  frames: FrameAxes[];
  meta: { N_f: number; r_min: number; source_demo_ids: string[] };
}

export interface StatePayload {
  tick: number;
  phase: string;
  s: number;
  d: number;
  pose: { p: Vec3; q: Quat };
  correcting: boolean;
  radius: number;
  frame: FrameAxes;
}

export interface ErrorPayload {
  code: string;
  detail: string;
}

export type ServerFrame =
  | { kind: "hello"; payload: HelloPayload }
  | { kind: "canal"; payload: CanalPayload }
  | { kind: "state"; payload: StatePayload }
  | { kind: "error"; payload: ErrorPayload };

export type CommandPayload =
  | { type: "correction"; kx: number; ky: number }
  | { type: "correction_end" }
  | { type: "backtrack" }
  | { type: "pause" }
  | { type: "resume" }
  | { type: "set_speed"; v: number }
  | { type: "grip" };

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface ClientState {
  canal: CanalPayload | null;
  lastState: StatePayload | null;
  status: ConnectionStatus;
  tickHz: number;
  trail: Vec3[];
}
