/** Pure derivation of what the player sees from the last protocol
 * responses. No game truth lives here: re-fetching state after a page
 * reload yields an identical view. */

import type {
  ActionOption,
  SessionState,
  TurnResult,
} from "./protocol.js";

export interface ChoiceView {
  concept: string;
  args: string[];
  label: string;
  applicable: boolean;
}

export interface DebriefView {
  turn: number;
  label: string; // "competence / narrative concept"
}

export interface ClientSessionView {
  turn: number;
  terminated: boolean;
  storyLines: string[];
  choices: ChoiceView[]; // empty once terminated
  reactions: string[]; // last turn's NPC responses
  debrief: DebriefView[];
}

export function actionLabel(concept: string, args: string[]): string {
  return args.length ? `${concept}(${args.join(", ")})` : concept;
}

export function deriveChoices(
  actions: ActionOption[],
  terminated: boolean,
): ChoiceView[] {
  if (terminated) return [];
  return actions.map((a) => ({
    concept: a.concept,
    args: a.args_template,
    label: actionLabel(a.concept, a.args_template),
    applicable: a.applicable,
  }));
}

export function deriveReactions(result: TurnResult | null): string[] {
  if (result === null) return [];
  return result.npc_actions.map((npc) => {
    const line = `${npc.character}: ${actionLabel(
      npc.executed.concept,
      npc.executed.args,
    )}`;
    return npc.influenced ? `${line} *` : line;
  });
}

export function deriveDebrief(state: SessionState): DebriefView[] {
  return state.debrief.map((d) => ({
    turn: d.turn,
    label: `${d.competences.join(", ")} / ${d.narrative_concept}`,
  }));
}

export function deriveView(
  state: SessionState,
  actions: ActionOption[],
  lastResult: TurnResult | null,
): ClientSessionView {
  return {
    turn: state.turn,
    terminated: state.terminated,
    storyLines: state.story,
    choices: deriveChoices(actions, state.terminated),
    reactions: deriveReactions(lastResult),
    debrief: deriveDebrief(state),
  };
}

/** Guard used before submitting: the UI may only send actions the server
 * listed as applicable. */
export function isSubmittable(view: ClientSessionView, choice: ChoiceView): boolean {
  return (
    !view.terminated &&
    choice.applicable &&
    view.choices.some(
      (c) =>
        c.applicable &&
        c.concept === choice.concept &&
        c.args.length === choice.args.length &&
        c.args.every((arg, i) => arg === choice.args[i]),
    )
  );
}
