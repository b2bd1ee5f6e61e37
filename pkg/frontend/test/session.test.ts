import { describe, expect, it } from "vitest";

import { SessionClient } from "../src/session.js";
import { ServerMsg } from "../src/types.js";
import { FakeSocket, makeRecord } from "./fakes.js";

describe("SessionClient", () => {
  it("dispatches decoded messages to the handler", () => {
    const socket = new FakeSocket();
    const client = new SessionClient(socket);
    const seen: string[] = [];
    client.onMessage = (msg: ServerMsg) => seen.push(msg.type);
    socket.emit({ schema: 1, type: "gap", dropped: 3 });
    socket.emit({ schema: 1, type: "record", step: 1, spline_version: 0,
                  points: [], record: makeRecord({ t: 0.01 }) });
    socket.emit("not json at all");
    expect(seen).toEqual(["gap", "record"]);
  });

  it("resolves commands on matching acks", async () => {
    const socket = new FakeSocket();
    const client = new SessionClient(socket);
    const promise = client.command({ kind: "pause" });
    const sent = JSON.parse(socket.sent[0]);
    expect(sent.kind).toBe("pause");
    expect(typeof sent.id).toBe("string");
    socket.emit({ schema: 1, type: "ack", kind: "pause", effective_step: 7, id: sent.id });
    const outcome = await promise;
    expect(outcome.ok).toBe(true);
    expect(outcome.ack?.effective_step).toBe(7);
  });

  it("resolves commands with failure on matching errors", async () => {
    const socket = new FakeSocket();
    const client = new SessionClient(socket);
    const promise = client.command({ kind: "resume" });
    const sent = JSON.parse(socket.sent[0]);
    socket.emit({ schema: 1, type: "error", reason: "session already finished", id: sent.id });
    const outcome = await promise;
    expect(outcome.ok).toBe(false);
    expect(outcome.error?.reason).toContain("finished");
  });

  it("keeps unrelated acks apart", async () => {
    const socket = new FakeSocket();
    const client = new SessionClient(socket);
    const p1 = client.command({ kind: "pause" });
    const p2 = client.command({ kind: "set_speed_multiplier", value: 2 });
    const id1 = JSON.parse(socket.sent[0]).id;
    const id2 = JSON.parse(socket.sent[1]).id;
    socket.emit({ schema: 1, type: "ack", kind: "set_speed_multiplier", effective_step: 1, id: id2 });
    socket.emit({ schema: 1, type: "ack", kind: "pause", effective_step: 2, id: id1 });
    expect((await p1).ack?.effective_step).toBe(2);
    expect((await p2).ack?.effective_step).toBe(1);
  });

  it("fails pending commands when the socket closes", async () => {
    const socket = new FakeSocket();
    const client = new SessionClient(socket);
    const promise = client.command({ kind: "pause" });
    socket.close();
    const outcome = await promise;
    expect(outcome.ok).toBe(false);
    expect(outcome.error?.reason).toContain("closed");
  });
});
