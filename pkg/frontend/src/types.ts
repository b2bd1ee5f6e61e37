/** Wire types for the ground-control service; schema version 1. */

export type PointRole = "endpoint" | "free_control" | "continuity_locked";

export interface PointInfo {
  segment: number;
  index: number;
  x: number;
  y: number;
  role: PointRole;
}

export interface SegmentSpec {
  points: [number, number][];
}

/** One telemetry row, mirroring the log columns. */
export interface StepRecord {
  t: number;
  x: number;
  y: number;
  theta: number;
  v: number;
  w: number;
  phi1: number;
  phi2: number;
  e_norm: number;
  e_path: number;
  lyapunov: number;
  chi_p_norm: number;
  chi3: number;
  kappa: number;
  theta_d_dot: number;
  u_theta: number;
  phi_steer: number;
  steer_saturated: number;
  v_ref: number;
  v_raw: number;
  v_filtered: number;
  u_v: number;
  u_v_p: number;
  u_v_i: number;
  u_v_d: number;
  u_v_ff: number;
  throttle_saturated: number;
  d_x: number;
  d_y: number;
  d_norm: number;
  w_reset: number;
}

export type SessionMode = "paused" | "running" | "finished";

interface MessageBase {
  schema: number;
}

export interface SnapshotMsg extends MessageBase {
  type: "snapshot";
  id: string;
  mode: SessionMode;
  step: number;
  t: number;
  multiplier: number;
  spline_version: number;
  warnings: string[];
  points: PointInfo[];
  guidance: { k1: number; k2: number; k_theta: number; direction: number };
  setpoint: { v_min: number; v_max: number; c_kappa: number };
  noise: { kind: string; bound: number; sigma: number | null };
  scenario: { spline: { degree: number; segments: SegmentSpec[] } } & Record<string, unknown>;
  record: StepRecord | null;
}

export interface RecordMsg extends MessageBase {
  type: "record";
  step: number;
  spline_version: number;
  points: PointInfo[];
  record: StepRecord;
}

export interface SplineMsg extends MessageBase {
  type: "spline";
  spline_version: number;
  points: PointInfo[];
  segments: SegmentSpec[];
}

export interface StatusMsg extends MessageBase {
  type: "status";
  mode: SessionMode;
  step: number;
  multiplier: number;
  spline_version: number;
  points: PointInfo[];
  guidance: { k1: number; k2: number; k_theta: number; direction: number };
  setpoint: { v_min: number; v_max: number; c_kappa: number };
}

export interface FieldFrameMsg extends MessageBase {
  type: "field_frame";
  w: number;
  bbox: number[];
  res: number;
  rows: [number, number, number, number][];
  id?: string;
}

export interface AckMsg extends MessageBase {
  type: "ack";
  kind: string;
  effective_step: number;
  id?: string | null;
}

export interface ErrorMsg extends MessageBase {
  type: "error";
  kind?: string;
  reason: string;
  id?: string | null;
}

export interface GapMsg extends MessageBase {
  type: "gap";
  dropped: number;
}

export type ServerMsg =
  | SnapshotMsg
  | RecordMsg
  | SplineMsg
  | StatusMsg
  | FieldFrameMsg
  | AckMsg
  | ErrorMsg
  | GapMsg;

export interface MoveCommand {
  kind: "move_free_point";
  segment: number;
  index: number;
  x: number;
  y: number;
  id?: string;
}

export type Command =
  | MoveCommand
  | { kind: "pause" | "resume" | "reset"; id?: string }
  | { kind: "set_speed_multiplier"; value: number; id?: string }
  | { kind: "set_guidance_gains"; k1: number; k2: number; k_theta: number; id?: string }
  | { kind: "set_speed_params"; v_min: number; v_max: number; c_kappa: number; id?: string }
  | { kind: "field_request"; bbox: number[]; res: number; w?: number; id?: string };

export function parseServerMsg(text: string): ServerMsg | null {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as { type?: unknown };
  if (typeof msg.type !== "string") return null;
  return data as ServerMsg;
}
