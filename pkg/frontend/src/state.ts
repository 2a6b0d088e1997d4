// UI state machine for the translate page.  Pure logic, no DOM: the
// controller owns a single state record, mutates it through the public
// operations, and notifies subscribers after every change.

import {
  GatewayClient,
  LanguageCode,
  TranslateOutcome,
  describeFailure,
  isSupportedPair,
  pairLabel,
} from "./gateway.js";

export interface UiState {
  source_lang: LanguageCode;
  target_lang: LanguageCode;
  source_text: string;
  target_text: string;
  busy: boolean;
  last_error: string | null;
}

export type StateListener = (state: UiState) => void;

/** True when the translate action should be clickable. */
export function canSubmit(state: UiState): boolean {
  return !state.busy && state.source_text.trim().length > 0;
}

export class TranslatorController {
  private readonly client: GatewayClient;
  private state: UiState;
  private readonly listeners = new Set<StateListener>();
  private epoch = 0;
  private inflight: AbortController | null = null;
  private pendingSwaps = 0;

  constructor(client: GatewayClient, source: LanguageCode = "en", target: LanguageCode = "fr") {
    if (!isSupportedPair(source, target)) {
      throw new Error(`unsupported language pair ${pairLabel(source, target)}`);
    }
    this.client = client;
    this.state = {
      source_lang: source,
      target_lang: target,
      source_text: "",
      target_text: "",
      busy: false,
      last_error: null,
    };
  }

  getState(): UiState {
    return { ...this.state };
  }

  subscribe(listener: StateListener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.getState());
    }
  }

  setSourceText(text: string): void {
    this.update({ source_text: text });
  }

  /** Select both dropdowns at once; rejects anything the gateway cannot serve. */
  setPair(source: LanguageCode, target: LanguageCode): void {
    if (!isSupportedPair(source, target)) {
      throw new Error(`unsupported language pair ${pairLabel(source, target)}`);
    }
    this.update({ source_lang: source, target_lang: target });
  }

  /** Change the source dropdown, forcing the other side to keep the pair valid. */
  selectSourceLang(lang: LanguageCode): void {
    if (lang === this.state.source_lang) {
      return;
    }
    let target = this.state.target_lang;
    if (lang !== "en") {
      target = "en";
    } else if (target === "en") {
      target = this.state.source_lang;
    }
    this.setPair(lang, target);
  }

  /** Change the target dropdown, forcing the other side to keep the pair valid. */
  selectTargetLang(lang: LanguageCode): void {
    if (lang === this.state.target_lang) {
      return;
    }
    let source = this.state.source_lang;
    if (lang !== "en") {
      source = "en";
    } else if (source === "en") {
      source = this.state.target_lang;
    }
    this.setPair(source, lang);
  }

  /**
   * Exchange the language selections and both text panes.  While a request
   * is in flight the swap is queued and applied once the response settles,
   * so the reply still lands in the pane it was issued for.
   */
  swapLanguages(): void {
    if (this.state.busy) {
      this.pendingSwaps += 1;
      return;
    }
    this.applySwap();
  }

  private applySwap(): void {
    this.update({
      source_lang: this.state.target_lang,
      target_lang: this.state.source_lang,
      source_text: this.state.target_text,
      target_text: this.state.source_text,
    });
  }

  /**
   * POST the source pane to the gateway.  Single-flight: a newer submission
   * aborts the one in progress and takes over the panes.  Every surviving
   * request resolves into exactly one of a target-pane update or an error
   * banner; superseded requests resolve as "aborted" and touch nothing.
   */
  async submitTranslation(): Promise<TranslateOutcome | null> {
    // The UI disables the button while busy, but an overlapping call can
    // still arrive (keyboard shortcut, double click before a render).
    // Single-flight handles it below; only an empty pane stops a request.
    if (this.state.source_text.trim().length === 0) {
      return null;
    }
    this.epoch += 1;
    const myEpoch = this.epoch;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;

    const { source_lang, target_lang, source_text } = this.state;
    this.update({ busy: true, last_error: null });

    const outcome = await this.client.translate(
      {
        request_id: `ui-${myEpoch}`,
        text: source_text,
        source_lang,
        target_lang,
      },
      controller.signal,
    );

    if (myEpoch !== this.epoch) {
      return outcome;
    }
    this.inflight = null;

    if (outcome.ok) {
      this.update({
        busy: false,
        target_text: outcome.response.translated_text,
        last_error: null,
      });
    } else if (outcome.failure.kind === "aborted") {
      this.update({ busy: false });
    } else {
      this.update({
        busy: false,
        last_error: describeFailure(outcome.failure, source_lang, target_lang),
      });
    }

    if (this.pendingSwaps % 2 === 1) {
      this.applySwap();
    }
    this.pendingSwaps = 0;
    return outcome;
  }
}
