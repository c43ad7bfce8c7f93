// Client session: token, cached state list, pending notifications, and the
// pair history. The rendered list mirrors the last get_state_list response
// and is re-fetched when the 10-minute window rolls over.

import {
  NotificationPayload,
  ReactName,
  StateListBody,
  StateName,
  windowIdAt,
} from "./protocol.js";
import { Connection } from "./socket.js";

export interface HistoryEntry {
  direction: "sent" | "received";
  kind: "state" | "react";
  state?: StateName;
  react?: ReactName;
  ref?: string;
  id: string;
}

export class ClientSession {
  token = "";
  user = "";
  currentList: StateListBody | null = null;
  notifications: NotificationPayload[] = [];
  history: HistoryEntry[] = [];
  private stateOfShare = new Map<string, StateName>();
  private listeners: Array<() => void> = [];

  constructor(private conn: Connection) {
    conn.on("notification", (body) => {
      this.onNotification(body as unknown as NotificationPayload);
    });
  }

  onChange(cb: () => void): void {
    this.listeners.push(cb);
  }

  private changed(): void {
    for (const cb of this.listeners) cb();
  }

  private onNotification(n: NotificationPayload): void {
    if (n.kind === "partner_state_visit" && n.state && n.ref) {
      this.stateOfShare.set(n.ref, n.state);
      this.history.push({
        direction: "received",
        kind: "state",
        state: n.state,
        id: n.ref,
      });
    }
    if (n.kind === "partner_react" && n.react) {
      this.history.push({
        direction: "received",
        kind: "react",
        react: n.react,
        state: n.state,
        ref: n.ref,
        id: n.ref ?? "",
      });
    }
    if (n.kind !== "paired") this.notifications.push(n);
    this.changed();
  }

  dismissNotification(n: NotificationPayload): void {
    this.notifications = this.notifications.filter((x) => x !== n);
    this.changed();
  }

  async register(name: string): Promise<void> {
    const body = await this.conn.request("register", { name });
    this.token = String(body.token);
    this.user = String(body.user);
    this.changed();
  }

  async pairWith(partner: string): Promise<void> {
    await this.conn.request("pair", { token: this.token, partner });
  }

  async refreshList(): Promise<StateListBody> {
    const body = await this.conn.request("get_state_list", { token: this.token });
    this.currentList = body as unknown as StateListBody;
    this.changed();
    return this.currentList;
  }

  /** Re-fetch when the window has rolled past the cached list. */
  async maybeRefresh(nowMs: number): Promise<void> {
    if (!this.currentList) return;
    if (windowIdAt(nowMs) !== this.currentList.window_id) {
      await this.refreshList();
    }
  }

  async shareState(
    state: StateName,
    provenance: "sensed_list" | "random_list" | "notification_share",
  ): Promise<void> {
    const body = await this.conn.request("share_state", {
      token: this.token,
      state,
      provenance,
    });
    const message = body.message as { id: string };
    this.history.push({ direction: "sent", kind: "state", state, id: message.id });
    this.changed();
  }

  async viewState(id: string): Promise<{ id: string; catalog: ReactName[] }> {
    const body = await this.conn.request("view_state", { token: this.token, id });
    return body as unknown as { id: string; catalog: ReactName[] };
  }

  async sendReact(id: string, react: ReactName, via: "quick" | "in_app"): Promise<void> {
    const body = await this.conn.request("send_react", {
      token: this.token,
      id,
      react,
      via,
    });
    const message = body.message as { id: string };
    this.history.push({
      direction: "sent",
      kind: "react",
      react,
      state: this.stateOfShare.get(id),
      ref: id,
      id: message.id,
    });
    this.changed();
  }

  async dontReact(id: string): Promise<void> {
    await this.conn.request("dont_react", { token: this.token, id });
  }

  async viewReact(id: string): Promise<{ react: ReactName; state: StateName }> {
    const body = await this.conn.request("view_react", { token: this.token, id });
    return body as unknown as { react: ReactName; state: StateName };
  }
}
