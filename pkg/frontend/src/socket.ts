// Connection wrapper: request/response correlation over the envelope
// protocol, plus typed event subscription. Every outgoing envelope is
// validated against the protocol schema before it leaves the client.

import {
  Envelope,
  RequestType,
  WIRE_VERSION,
  requestEnvelope,
} from "./protocol.js";

export interface Transport {
  send(line: string): void;
  onLine(cb: (line: string) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export class WsTransport implements Transport {
  private socket: WebSocket;
  private lineHandlers: Array<(line: string) => void> = [];
  private closeHandlers: Array<() => void> = [];
  private backlog: string[] = [];
  private open = false;

  constructor(url: string) {
    this.socket = new WebSocket(url);
    this.socket.onopen = () => {
      this.open = true;
      for (const line of this.backlog) this.socket.send(line);
      this.backlog = [];
    };
    this.socket.onmessage = (event) => {
      for (const handler of this.lineHandlers) handler(String(event.data));
    };
    this.socket.onclose = () => {
      for (const handler of this.closeHandlers) handler();
    };
  }

  send(line: string): void {
    if (this.open) this.socket.send(line);
    else this.backlog.push(line);
  }

  onLine(cb: (line: string) => void): void {
    this.lineHandlers.push(cb);
  }

  onClose(cb: () => void): void {
    this.closeHandlers.push(cb);
  }

  close(): void {
    this.socket.close();
  }
}

export class ProtocolError extends Error {
  constructor(
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

type Pending = {
  resolve: (body: Record<string, unknown>) => void;
  reject: (err: Error) => void;
};

export class Connection {
  private seq = 0;
  private pending = new Map<number, Pending>();
  private handlers = new Map<string, Array<(body: Record<string, unknown>) => void>>();

  constructor(private transport: Transport) {
    transport.onLine((line) => this.handleLine(line));
  }

  /** Send a request; resolves with the response body. */
  request(
    type: RequestType,
    body: Record<string, unknown>,
  ): Promise<Record<string, unknown>> {
    this.seq += 1;
    const envelope: Envelope = { version: WIRE_VERSION, type, seq: this.seq, body };
    // The UI must only ever emit protocol-legal envelopes.
    requestEnvelope.parse(envelope);
    const promise = new Promise<Record<string, unknown>>((resolve, reject) => {
      this.pending.set(envelope.seq, { resolve, reject });
    });
    this.transport.send(JSON.stringify(envelope));
    return promise;
  }

  on(type: string, cb: (body: Record<string, unknown>) => void): void {
    const existing = this.handlers.get(type) ?? [];
    existing.push(cb);
    this.handlers.set(type, existing);
  }

  private handleLine(line: string): void {
    let envelope: Envelope;
    try {
      envelope = JSON.parse(line) as Envelope;
    } catch {
      return;
    }
    const re = envelope.body?.re;
    if (typeof re === "number" && this.pending.has(re)) {
      const pending = this.pending.get(re)!;
      this.pending.delete(re);
      if (envelope.type === "error") {
        pending.reject(
          new ProtocolError(
            String(envelope.body.code ?? "ERROR"),
            String(envelope.body.message ?? "protocol error"),
          ),
        );
      } else {
        pending.resolve(envelope.body);
      }
      return;
    }
    for (const handler of this.handlers.get(envelope.type) ?? []) {
      handler(envelope.body);
    }
  }
}
