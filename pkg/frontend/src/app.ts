/** DOM wiring: one session per browser tab, the server stays the
 * serializer. Input is disabled from submission until the turn result
 * arrives; protocol errors are surfaced inline and leave the session
 * playable. */

import { ProtocolError, SessionClient, TurnResult } from "./protocol.js";
import {
  ChoiceView,
  ClientSessionView,
  deriveView,
  isSubmittable,
} from "./viewmodel.js";

export class App {
  private lastResult: TurnResult | null = null;
  private busy = false;

  constructor(
    private client: SessionClient,
    private root: Document = document,
  ) {}

  async run(): Promise<void> {
    await this.client.start();
    await this.refresh();
  }

  private el(id: string): HTMLElement {
    const node = this.root.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node;
  }

  async refresh(): Promise<void> {
    const [state, actions] = await Promise.all([
      this.client.state(),
      this.client.actions(),
    ]);
    this.render(deriveView(state, actions, this.lastResult));
  }

  private render(view: ClientSessionView): void {
    this.el("turn").textContent = view.terminated
      ? `The story has ended (turn ${view.turn}).`
      : `Turn ${view.turn + 1} — what do you do?`;

    const story = this.el("story");
    story.replaceChildren(
      ...view.storyLines.map((line) => {
        const p = this.root.createElement("p");
        p.textContent = line;
        return p;
      }),
    );

    const reactions = this.el("reactions");
    reactions.replaceChildren(
      ...view.reactions.map((line) => {
        const li = this.root.createElement("li");
        li.textContent = line;
        return li;
      }),
    );

    const choices = this.el("choices");
    choices.replaceChildren(
      ...view.choices.map((choice) => {
        const button = this.root.createElement("button");
        button.textContent = choice.label;
        button.disabled = this.busy || !choice.applicable;
        button.addEventListener("click", () => void this.submit(view, choice));
        return button;
      }),
    );

    const debrief = this.el("debrief");
    debrief.replaceChildren(
      ...view.debrief.map((entry) => {
        const li = this.root.createElement("li");
        li.textContent = `turn ${entry.turn}: ${entry.label}`;
        return li;
      }),
    );
    (this.el("debrief-panel") as HTMLElement).hidden =
      !view.terminated && view.debrief.length === 0;
  }

  private async submit(view: ClientSessionView, choice: ChoiceView): Promise<void> {
    if (this.busy || !isSubmittable(view, choice)) return;
    this.busy = true;
    this.setError("");
    this.setInputEnabled(false);
    try {
      this.lastResult = await this.client.act(choice.concept, choice.args);
    } catch (err) {
      this.setError(
        err instanceof ProtocolError ? err.message : "connection error — try again",
      );
    } finally {
      this.busy = false;
    }
    await this.refresh();
  }

  private setInputEnabled(enabled: boolean): void {
    for (const button of this.el("choices").querySelectorAll("button")) {
      button.disabled = !enabled;
    }
  }

  private setError(message: string): void {
    this.el("error").textContent = message;
  }
}

export function main(): void {
  const app = new App(new SessionClient(""));
  void app.run().catch((err) => {
    const node = document.getElementById("error");
    if (node) node.textContent = String(err);
  });
}

if (typeof document !== "undefined" && document.getElementById("choices")) {
  main();
}
