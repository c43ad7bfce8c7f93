// Test double for the service: speaks the same envelope protocol over an
// in-memory transport and validates every envelope the client emits against
// the protocol schema, failing the test on any illegal message.

import {
  Envelope,
  QUICK_REACTS,
  StateName,
  WIRE_VERSION,
  requestEnvelope,
} from "../src/protocol.js";
import { Transport } from "../src/socket.js";

export class FakeTransport implements Transport {
  sentLines: string[] = [];
  private lineHandlers: Array<(line: string) => void> = [];
  server: FakeServer | null = null;

  send(line: string): void {
    this.sentLines.push(line);
    this.server?.receive(line);
  }

  onLine(cb: (line: string) => void): void {
    this.lineHandlers.push(cb);
  }

  onClose(): void {}

  close(): void {}

  deliver(line: string): void {
    for (const handler of this.lineHandlers) handler(line);
  }
}

interface Share {
  id: string;
  state: StateName;
  phase: "delivered" | "viewed" | "reacted" | "dismissed";
}

export class FakeServer {
  outSeq = 0;
  received: Envelope[] = [];
  shares = new Map<string, Share>();
  reacts = new Map<string, { react: string; ref: string }>();
  nextMsg = 1;
  listBody: Record<string, unknown> = {
    window_id: 1,
    mode: "sensing_off",
    states: ["calm", "eating", "waving"],
    social: "waving",
    sensed: false,
  };

  constructor(private transport: FakeTransport) {
    transport.server = this;
  }

  receive(line: string): void {
    const envelope = JSON.parse(line) as Envelope;
    // Every emitted envelope must validate against the protocol schema.
    requestEnvelope.parse(envelope);
    this.received.push(envelope);
    const re = envelope.seq;
    const reply = (type: string, body: Record<string, unknown>) =>
      this.push(type, { re, ...body });
    switch (envelope.type) {
      case "register":
        reply("register", { user: "u1", token: "tok-1", name: envelope.body.name });
        break;
      case "pair":
        reply("pair", { pair: "p1", users: ["u1", "u2"], mode: "sensing_off" });
        break;
      case "get_state_list":
        reply("get_state_list", this.listBody);
        break;
      case "share_state": {
        const id = `p1-m${this.nextMsg++}`;
        reply("share_state", {
          message: { id, state: envelope.body.state, kind: "state_share" },
        });
        break;
      }
      case "view_state": {
        const share = this.shares.get(String(envelope.body.id));
        if (!share || share.phase === "reacted" || share.phase === "dismissed") {
          reply("error", { code: "ALREADY_RESOLVED", message: "resolved" });
          break;
        }
        share.phase = "viewed";
        reply("view_state", {
          id: share.id,
          catalog: [
            "excited", "calm", "angry", "sad", "surprised", "bored",
            "thumbs_up", "nodding", "hugging", "handholding", "love",
            "pat_on_the_back", "question", "call_me",
          ],
          quick: [...QUICK_REACTS],
        });
        break;
      }
      case "send_react": {
        const target = String(envelope.body.id);
        if (this.reacts.has(target)) {
          this.push("error", { re, code: "REACT_TO_REACT", message: "no" });
          break;
        }
        const share = this.shares.get(target);
        if (!share || share.phase === "reacted" || share.phase === "dismissed") {
          this.push("error", { re, code: "ALREADY_RESOLVED", message: "no" });
          break;
        }
        share.phase = "reacted";
        const id = `p1-m${this.nextMsg++}`;
        this.reacts.set(id, { react: String(envelope.body.react), ref: target });
        reply("send_react", {
          message: { id, react: envelope.body.react, ref: target },
        });
        break;
      }
      case "dont_react": {
        const share = this.shares.get(String(envelope.body.id));
        if (share) share.phase = "dismissed";
        reply("dont_react", { ok: true });
        break;
      }
      case "view_react": {
        const react = this.reacts.get(String(envelope.body.id));
        if (!react) {
          this.push("error", { re, code: "UNKNOWN_MESSAGE", message: "no" });
          break;
        }
        const referenced = this.shares.get(react.ref);
        reply("view_react", {
          react: react.react,
          state: referenced?.state ?? "calm",
          id: envelope.body.id,
        });
        break;
      }
      default:
        this.push("error", { re, code: "UNKNOWN_TYPE", message: "?" });
    }
  }

  push(type: string, body: Record<string, unknown>): void {
    this.outSeq += 1;
    this.transport.deliver(
      JSON.stringify({ version: WIRE_VERSION, type, seq: this.outSeq, body }),
    );
  }

  /** Partner shares a state with us. */
  partnerShares(state: StateName): string {
    const id = `p1-m${this.nextMsg++}`;
    this.shares.set(id, { id, state, phase: "delivered" });
    this.push("notification", {
      kind: "partner_state_visit",
      recipient: "u1",
      state,
      ref: id,
      quick_reacts: [...QUICK_REACTS],
      created_at: 0,
    });
    return id;
  }

  partnerReacts(react: string, ref: string, state: StateName): string {
    const id = `p1-m${this.nextMsg++}`;
    this.reacts.set(id, { react, ref });
    this.push("notification", {
      kind: "partner_react",
      recipient: "u1",
      react,
      state,
      ref: id,
      created_at: 0,
    });
    return id;
  }

  suggestOwnState(state: StateName, sensed: boolean): void {
    this.push("notification", {
      kind: "own_state_suggestion",
      recipient: "u1",
      state,
      sensed_badge: sensed,
      actions: ["share", "dismiss"],
      created_at: 0,
    });
  }
}

export function connectedPair(): { transport: FakeTransport; server: FakeServer } {
  const transport = new FakeTransport();
  const server = new FakeServer(transport);
  return { transport, server };
}
