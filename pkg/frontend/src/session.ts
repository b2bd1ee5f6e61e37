/** WebSocket session client: decodes the stream, tracks command acks.

The socket is injected through a minimal interface so the protocol logic
is testable without a browser.
*/

import {
  AckMsg,
  Command,
  ErrorMsg,
  ServerMsg,
  parseServerMsg,
} from "./types.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: ((ev: unknown) => void) | null;
}

export interface CommandOutcome {
  ok: boolean;
  ack?: AckMsg;
  error?: ErrorMsg;
}

export class SessionClient {
  private nextId = 1;
  private waiting = new Map<string, (outcome: CommandOutcome) => void>();
  onMessage: ((msg: ServerMsg) => void) | null = null;
  onClose: (() => void) | null = null;

  constructor(private readonly socket: SocketLike) {
    socket.onmessage = (ev) => this.handle(ev.data);
    socket.onclose = () => {
      this.failAll("connection closed");
      if (this.onClose) this.onClose();
    };
    socket.onerror = () => this.failAll("connection error");
  }

  private failAll(reason: string): void {
    for (const resolve of this.waiting.values()) {
      resolve({ ok: false, error: { schema: 1, type: "error", reason } });
    }
    this.waiting.clear();
  }

  private handle(text: string): void {
    const msg = parseServerMsg(text);
    if (msg === null) return;
    if ((msg.type === "ack" || msg.type === "error") && msg.id) {
      const resolve = this.waiting.get(String(msg.id));
      if (resolve) {
        this.waiting.delete(String(msg.id));
        resolve(msg.type === "ack" ? { ok: true, ack: msg } : { ok: false, error: msg });
      }
    }
    if (this.onMessage) this.onMessage(msg);
  }

  /** Send a command; resolves with its ack or rejection message. */
  command(cmd: Command): Promise<CommandOutcome> {
    const id = `c${this.nextId++}`;
    const payload = { ...cmd, id };
    return new Promise((resolve) => {
      this.waiting.set(id, resolve);
      this.socket.send(JSON.stringify(payload));
    });
  }

  /** Fire-and-forget send (drag streams resolve via the last ack only). */
  commandNoWait(cmd: Command): void {
    this.socket.send(JSON.stringify(cmd));
  }

  close(): void {
    this.socket.close();
  }
}
