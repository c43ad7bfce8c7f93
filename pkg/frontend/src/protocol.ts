// Wire protocol: newline-delimited JSON envelopes, one per WebSocket text
// frame. Mirrors the server's canonical enumeration names exactly.

import { z } from "zod";

export const WIRE_VERSION = 1;

export const STATES = [
  "excited",
  "calm",
  "angry",
  "sad",
  "surprised",
  "bored",
  "neutral",
  "eating",
  "sleeping",
  "walking",
  "running",
  "exercise",
  "waving",
  "hugging",
  "handholding",
] as const;

// Table order: emotions, acknowledgement, caring, follow-up.
export const REACTS = [
  "excited",
  "calm",
  "angry",
  "sad",
  "surprised",
  "bored",
  "thumbs_up",
  "nodding",
  "hugging",
  "handholding",
  "love",
  "pat_on_the_back",
  "question",
  "call_me",
] as const;

// Fixed quick-react set, in fixed order.
export const QUICK_REACTS = ["love", "nodding", "handholding", "hugging"] as const;

export type StateName = (typeof STATES)[number];
export type ReactName = (typeof REACTS)[number];

export const stateName = z.enum(STATES);
export const reactName = z.enum(REACTS);

const requestBodies = {
  register: z.object({
    name: z.string().min(1),
    tz_offset_mins: z.number().int().optional(),
  }),
  pair: z.object({ token: z.string(), partner: z.string() }),
  get_state_list: z.object({ token: z.string() }),
  share_state: z.object({
    token: z.string(),
    state: stateName,
    provenance: z.enum(["sensed_list", "random_list", "notification_share"]),
  }),
  view_state: z.object({ token: z.string(), id: z.string() }),
  send_react: z.object({
    token: z.string(),
    id: z.string(),
    react: reactName,
    via: z.enum(["quick", "in_app"]),
  }),
  dont_react: z.object({ token: z.string(), id: z.string() }),
  view_react: z.object({ token: z.string(), id: z.string() }),
  sensor_event: z.object({
    token: z.string(),
    event: z.object({
      t: z.number(),
      kind: z.enum(["hr", "motion", "profile"]),
      payload: z.record(z.unknown()),
    }),
  }),
} as const;

export type RequestType = keyof typeof requestBodies;

export const requestEnvelope = z.discriminatedUnion(
  "type",
  Object.entries(requestBodies).map(([type, body]) =>
    z.object({
      version: z.literal(WIRE_VERSION),
      type: z.literal(type),
      seq: z.number().int().positive(),
      body,
    }),
  ) as never,
);

export const notificationBody = z.object({
  kind: z.enum([
    "partner_state_visit",
    "partner_react",
    "own_state_suggestion",
    "paired",
  ]),
  state: stateName.optional(),
  react: reactName.optional(),
  ref: z.string().optional(),
  quick_reacts: z.array(reactName).length(4).optional(),
  sensed_badge: z.boolean().optional(),
  actions: z.array(z.string()).optional(),
  created_at: z.number().optional(),
  pair: z.string().optional(),
  mode: z.string().optional(),
  users: z.array(z.string()).optional(),
});

export const serverEnvelope = z.object({
  version: z.literal(WIRE_VERSION),
  type: z.string(),
  seq: z.number().int().positive(),
  body: z.record(z.unknown()),
});

export interface Envelope {
  version: number;
  type: string;
  seq: number;
  body: Record<string, unknown>;
}

export interface StateListBody {
  window_id: number;
  mode: "sensing_off" | "sensing_on";
  states: StateName[];
  social: StateName;
  sensed: boolean;
}

export interface NotificationPayload {
  kind: string;
  state?: StateName;
  react?: ReactName;
  ref?: string;
  quick_reacts?: ReactName[];
  sensed_badge?: boolean;
  actions?: string[];
}

// Placeholder art: every state and react is a labeled glyph.
export const STATE_GLYPHS: Record<StateName, string> = {
  excited: "\u{1F929}",
  calm: "\u{1F60C}",
  angry: "\u{1F620}",
  sad: "\u{1F622}",
  surprised: "\u{1F62E}",
  bored: "\u{1F971}",
  neutral: "\u{1F610}",
  eating: "\u{1F37D}",
  sleeping: "\u{1F634}",
  walking: "\u{1F6B6}",
  running: "\u{1F3C3}",
  exercise: "\u{1F4AA}",
  waving: "\u{1F44B}",
  hugging: "\u{1F917}",
  handholding: "\u{1F91D}",
};

export const REACT_GLYPHS: Record<ReactName, string> = {
  excited: "\u{1F929}",
  calm: "\u{1F60C}",
  angry: "\u{1F620}",
  sad: "\u{1F622}",
  surprised: "\u{1F62E}",
  bored: "\u{1F971}",
  thumbs_up: "\u{1F44D}",
  nodding: "\u{1F646}",
  hugging: "\u{1F917}",
  handholding: "\u{1F91D}",
  love: "\u{1F60D}",
  pat_on_the_back: "\u{1FAC2}",
  question: "❓",
  call_me: "\u{1F4DE}",
};

export function labelOf(name: string): string {
  return name.replace(/_/g, " ");
}

export const WINDOW_MS = 600_000;

export function windowIdAt(nowMs: number): number {
  return Math.floor(nowMs / WINDOW_MS);
}
