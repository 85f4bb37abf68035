import { describe, expect, it } from "vitest";

import { ProtocolError, SessionClient } from "../src/protocol.js";
import { FakeServer } from "./fakeserver.js";

function client(): SessionClient {
  return new SessionClient("", new FakeServer().fetch);
}

describe("SessionClient", () => {
  it("starts a session and exposes the token", async () => {
    const c = client();
    const token = await c.start();
    expect(token).toMatch(/^s\d{6}$/);
    expect(c.sessionToken).toBe(token);
  });

  it("rejects protocol calls before start", async () => {
    await expect(client().state()).rejects.toThrow("no active session");
  });

  it("fetches initial state", async () => {
    const c = client();
    await c.start();
    const state = await c.state();
    expect(state.turn).toBe(0);
    expect(state.terminated).toBe(false);
    expect(state.story).toEqual([]);
    expect(state.debrief).toEqual([]);
  });

  it("lists actions with applicability flags", async () => {
    const c = client();
    await c.start();
    const actions = await c.actions();
    expect(actions.find((a) => a.concept === "Idle")?.applicable).toBe(true);
    expect(
      actions.find((a) => a.concept === "RequestResource")?.args_template,
    ).toEqual(["Bob", "Herb"]);
  });

  it("advances the turn on act", async () => {
    const c = client();
    await c.start();
    const result = await c.act("Idle", []);
    expect(result.turn).toBe(1);
    expect((await c.state()).turn).toBe(1);
  });

  it("surfaces a 400 with the server detail", async () => {
    const c = client();
    await c.start();
    const bad = c.act("AcceptRequest", ["Adam", "Herb"]);
    await expect(bad).rejects.toBeInstanceOf(ProtocolError);
    await expect(bad).rejects.toThrow("not applicable");
    expect((await c.state()).turn).toBe(0);
  });

  it("surfaces a 409 after termination", async () => {
    const c = client();
    await c.start();
    for (let i = 0; i < 5; i++) await c.act("Idle", []);
    expect((await c.state()).terminated).toBe(true);
    await expect(c.act("Idle", [])).rejects.toMatchObject({ status: 409 });
  });

  it("404s on an unknown token", async () => {
    const server = new FakeServer();
    const c = new SessionClient("", server.fetch);
    await c.start();
    server.sessions.clear();
    await expect(c.state()).rejects.toMatchObject({ status: 404 });
  });
});
