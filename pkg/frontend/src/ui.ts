// DOM wiring for the translate page: two language dropdowns, a swap
// button, paired text panes, a translate action, and an error banner.

import { LanguageCode } from "./gateway.js";
import { TranslatorController, UiState, canSubmit } from "./state.js";

const LANGUAGE_NAMES: Record<LanguageCode, string> = {
  en: "English",
  fr: "French",
  de: "German",
  it: "Italian",
  es: "Spanish",
};

function languageSelect(id: string): HTMLSelectElement {
  const select = document.createElement("select");
  select.id = id;
  for (const code of Object.keys(LANGUAGE_NAMES) as LanguageCode[]) {
    const option = document.createElement("option");
    option.value = code;
    option.textContent = LANGUAGE_NAMES[code];
    select.appendChild(option);
  }
  return select;
}

export function mount(root: HTMLElement, controller: TranslatorController): void {
  const sourceSelect = languageSelect("source-lang");
  const targetSelect = languageSelect("target-lang");

  const swapButton = document.createElement("button");
  swapButton.id = "swap";
  swapButton.type = "button";
  swapButton.textContent = "⇄";
  swapButton.title = "Swap languages and panes";

  const sourcePane = document.createElement("textarea");
  sourcePane.id = "source-text";
  sourcePane.placeholder = "Paste text to translate";

  const targetPane = document.createElement("textarea");
  targetPane.id = "target-text";
  targetPane.readOnly = true;
  targetPane.placeholder = "Translation";

  const translateButton = document.createElement("button");
  translateButton.id = "translate";
  translateButton.type = "button";
  translateButton.textContent = "Translate";

  const banner = document.createElement("div");
  banner.id = "error-banner";
  banner.setAttribute("role", "alert");
  banner.hidden = true;

  const controls = document.createElement("div");
  controls.className = "controls";
  controls.append(sourceSelect, swapButton, targetSelect, translateButton);

  const panes = document.createElement("div");
  panes.className = "panes";
  panes.append(sourcePane, targetPane);

  root.append(controls, panes, banner);

  sourceSelect.addEventListener("change", () => {
    controller.selectSourceLang(sourceSelect.value as LanguageCode);
  });
  targetSelect.addEventListener("change", () => {
    controller.selectTargetLang(targetSelect.value as LanguageCode);
  });
  swapButton.addEventListener("click", () => controller.swapLanguages());
  sourcePane.addEventListener("input", () => controller.setSourceText(sourcePane.value));
  translateButton.addEventListener("click", () => {
    void controller.submitTranslation();
  });

  const render = (state: UiState): void => {
    sourceSelect.value = state.source_lang;
    targetSelect.value = state.target_lang;
    if (sourcePane.value !== state.source_text) {
      sourcePane.value = state.source_text;
    }
    targetPane.value = state.target_text;
    translateButton.disabled = !canSubmit(state);
    translateButton.textContent = state.busy ? "Translating…" : "Translate";
    banner.hidden = state.last_error === null;
    banner.textContent = state.last_error ?? "";
  };

  controller.subscribe(render);
  render(controller.getState());
}
