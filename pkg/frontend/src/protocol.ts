/** Typed client for the session wire protocol (version 1).
 *
 * The client holds no authoritative game state: every render derives from
 * the most recent server response. See ../../docs/protocol.md.
 */

export const PROTOCOL_VERSION = 1;

export interface ActionOption {
  concept: string;
  args_template: string[];
  applicable: boolean;
}

export interface DebriefEntry {
  turn: number;
  case_id: string;
  narrative_concept: string;
  competences: string[];
}

export interface SessionState {
  protocol_version: number;
  turn: number;
  terminated: boolean;
  story: string[];
  debrief: DebriefEntry[];
}

export interface NpcAction {
  character: string;
  proposed: { concept: string; args: string[] };
  executed: {
    actor: string;
    concept: string;
    args: string[];
    success: boolean;
    reason: string;
  };
  influenced: boolean;
}

export interface TurnResult {
  turn: number;
  vc_action: { actor: string; concept: string; args: string[]; success: boolean };
  npc_actions: NpcAction[];
  opportunities: number;
  negotiations: unknown[];
  applied_cases: unknown[];
  facts_added: string[];
  facts_removed: string[];
  terminated: boolean;
}

export class ProtocolError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = "ProtocolError";
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* non-JSON error body: keep the status text */
    }
    throw new ProtocolError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class SessionClient {
  private token: string | null = null;

  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  get sessionToken(): string | null {
    return this.token;
  }

  async start(seed = 0): Promise<string> {
    const body = await unwrap<{ protocol_version: number; token: string }>(
      await this.fetchFn(`${this.baseUrl}/sessions`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ seed }),
      }),
    );
    this.token = body.token;
    return body.token;
  }

  private url(tail: string): string {
    if (this.token === null) throw new Error("no active session");
    return `${this.baseUrl}/sessions/${this.token}/${tail}`;
  }

  async state(): Promise<SessionState> {
    return unwrap<SessionState>(await this.fetchFn(this.url("state")));
  }

  async actions(): Promise<ActionOption[]> {
    const body = await unwrap<{ actions: ActionOption[] }>(
      await this.fetchFn(this.url("actions")),
    );
    return body.actions;
  }

  async act(concept: string, args: string[]): Promise<TurnResult> {
    const body = await unwrap<{ result: TurnResult }>(
      await this.fetchFn(this.url("act"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ concept, args }),
      }),
    );
    return body.result;
  }

  async log(): Promise<unknown> {
    const body = await unwrap<{ log: unknown }>(await this.fetchFn(this.url("log")));
    return body.log;
  }
}
