// Editor state machine for the plan-completion loop. Pure of DOM concerns:
// the page layer renders snapshots and calls the mutators, tests drive it
// with a stubbed transport.

import { ApiError } from "./api.js";
import type { SuggestRequest, SuggestResponse, Suggestion } from "./api.js";

export const GAP_MARKER = "??";

export type Slot = { kind: "token"; text: string } | { kind: "gap" };

export interface GapSuggestions {
  /** Slot index of the gap these suggestions belong to. */
  slot: number;
  /** Ranked suggestions, weight descending. */
  items: Suggestion[];
}

export interface EditorError {
  message: string;
  /** True for transport failures where a retry may succeed unchanged. */
  retryable: boolean;
}

export interface EditorState {
  slots: Slot[];
  m: number;
  pending: boolean;
  objective: number | null;
  suggestions: GapSuggestions[] | null;
  invalidTokens: string[];
  error: EditorError | null;
}

export interface SuggestTransport {
  suggest(
    request: SuggestRequest,
    signal?: AbortSignal,
  ): Promise<SuggestResponse>;
}

function isAbort(err: unknown): boolean {
  return err instanceof Error && err.name === "AbortError";
}

export class PlanEditor {
  private slots: Slot[] = [];
  private m: number;
  private pending = false;
  private objective: number | null = null;
  private suggestions: GapSuggestions[] | null = null;
  private invalidTokens: string[] = [];
  private error: EditorError | null = null;
  private inFlight: AbortController | null = null;

  /** Called after every state change; the page layer re-renders here. */
  onChange: (() => void) | null = null;

  constructor(
    private transport: SuggestTransport,
    m = 10,
    private warn: (message: string) => void = (m) => console.warn(m),
  ) {
    this.m = m;
  }

  /** Rebuild an editor from an observation line, "??" marking gaps. */
  static fromObservation(
    transport: SuggestTransport,
    observation: string[],
    m = 10,
    warn?: (message: string) => void,
  ): PlanEditor {
    const editor = new PlanEditor(transport, m, warn);
    for (const token of observation) {
      if (token === GAP_MARKER) {
        editor.appendGap();
      } else {
        editor.appendToken(token);
      }
    }
    return editor;
  }

  get state(): EditorState {
    return {
      slots: this.slots.map((s) => ({ ...s })),
      m: this.m,
      pending: this.pending,
      objective: this.objective,
      suggestions: this.suggestions
        ? this.suggestions.map((g) => ({
            slot: g.slot,
            items: g.items.map((i) => ({ ...i })),
          }))
        : null,
      invalidTokens: [...this.invalidTokens],
      error: this.error ? { ...this.error } : null,
    };
  }

  observation(): string[] {
    return this.slots.map((s) => (s.kind === "gap" ? GAP_MARKER : s.text));
  }

  gapCount(): number {
    return this.slots.filter((s) => s.kind === "gap").length;
  }

  canFetch(): boolean {
    return this.gapCount() >= 1;
  }

  appendToken(text: string): void {
    this.slots.push({ kind: "token", text });
    this.invalidate();
  }

  appendGap(): void {
    this.slots.push({ kind: "gap" });
    this.invalidate();
  }

  removeSlot(index: number): void {
    if (index < 0 || index >= this.slots.length) {
      return;
    }
    this.slots.splice(index, 1);
    this.invalidate();
  }

  clear(): void {
    this.slots = [];
    this.objective = null;
    this.invalidate();
  }

  setM(m: number): void {
    if (m < 1 || !Number.isInteger(m)) {
      return;
    }
    this.m = m;
    this.invalidate();
  }

  /**
   * Ask the service for per-gap suggestions. No-op without a gap. A call
   * while another is in flight aborts the older one; only the newest
   * response is applied.
   */
  async fetchSuggestions(): Promise<void> {
    if (!this.canFetch()) {
      return;
    }
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;
    this.pending = true;
    this.suggestions = null;
    this.invalidTokens = [];
    this.error = null;
    this.notify();
    try {
      const response = await this.transport.suggest(
        { observation: this.observation(), m: this.m },
        controller.signal,
      );
      if (this.inFlight !== controller) {
        return;
      }
      this.applyResponse(response);
    } catch (err) {
      if (this.inFlight !== controller || isAbort(err)) {
        return;
      }
      this.applyFailure(err);
    } finally {
      if (this.inFlight === controller) {
        this.inFlight = null;
        this.pending = false;
        this.notify();
      }
    }
  }

  /**
   * Turn the gap at `gapSlot` into the suggestion at `rank`. Invalidates
   * every suggestion list and, while gaps remain, refetches once with the
   * updated context. Stale input (no list for that slot, rank out of
   * range, slot no longer a gap) is a warning no-op.
   */
  acceptSuggestion(gapSlot: number, rank: number): void {
    const list = this.suggestions?.find((g) => g.slot === gapSlot);
    if (!list) {
      this.warn(`no suggestions at slot ${gapSlot}; ignoring accept`);
      return;
    }
    const chosen = list.items[rank];
    if (!chosen) {
      this.warn(`stale rank ${rank} at slot ${gapSlot}; ignoring accept`);
      return;
    }
    const slot = this.slots[gapSlot];
    if (!slot || slot.kind !== "gap") {
      this.warn(`slot ${gapSlot} is not a gap; ignoring accept`);
      return;
    }
    this.slots[gapSlot] = { kind: "token", text: chosen.action };
    this.suggestions = null;
    this.notify();
    if (this.canFetch()) {
      void this.fetchSuggestions();
    }
  }

  private applyResponse(response: SuggestResponse): void {
    const byWeightDesc = (a: Suggestion, b: Suggestion) => b.weight - a.weight;
    this.suggestions = response.holes.map((hole) => ({
      slot: hole.position,
      items: [...hole.suggestions].sort(byWeightDesc),
    }));
    this.objective = response.objective;
  }

  private applyFailure(err: unknown): void {
    if (err instanceof ApiError) {
      this.invalidTokens = [...err.unknownActions];
      this.error = { message: err.message, retryable: err.status >= 500 };
    } else {
      const message = err instanceof Error ? err.message : String(err);
      this.error = { message: `request failed: ${message}`, retryable: true };
    }
  }

  /** Editing the plan outdates anything derived from it. */
  private invalidate(): void {
    this.suggestions = null;
    this.notify();
  }

  private notify(): void {
    this.onChange?.();
  }
}
