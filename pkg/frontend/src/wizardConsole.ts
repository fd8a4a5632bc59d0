// Wizard console: chat pane, auto-refreshing suggestion panel with stance
// badges and virtual scrolling, keyword search bar, pro/con/off filter
// toggle, hedge snippets, and a composer that tracks selection provenance.

import { ChatChannel } from "./channel.js";
import { ComposerModel } from "./composer.js";
import { clear, el, toast } from "./dom.js";
import { FilterStance, ServerFrame } from "./protocol.js";
import { PANEL_CAP, SuggestionPanelModel } from "./suggestions.js";
import { TimerModel } from "./timer.js";

const ROW_PX = 64;

export interface WizardContext {
  channel: ChatChannel;
  hedges: string[];
  root: HTMLElement;
}

export class WizardConsole {
  readonly panel = new SuggestionPanelModel();
  readonly composer = new ComposerModel();
  readonly timer = new TimerModel();

  private chatLog!: HTMLElement;
  private listBox!: HTMLElement;
  private composerBox!: HTMLTextAreaElement;
  private closeButton!: HTMLButtonElement;

  constructor(private readonly context: WizardContext) {}

  mount(): void {
    this.render();
    this.context.channel.on("*", (frame) => this.onFrame(frame));
    this.context.channel.connect();
    setInterval(() => this.refreshTimer(), 500);
  }

  private onFrame(frame: ServerFrame): void {
    switch (frame.type) {
      case "suggestions":
        this.panel.applyPush(frame.items);
        this.renderSuggestions();
        break;
      case "utterance":
        this.appendMessage("participant", frame.text);
        break;
      case "phase":
        this.timer.applyPhase(frame);
        break;
      case "error":
        toast(`${frame.code}: ${frame.detail ?? ""}`);
        break;
      case "superseded":
        toast("This console was opened elsewhere; this tab is now read-only.");
        break;
      default:
        break;
    }
  }

  private render(): void {
    const { root } = this.context;
    clear(root);

    this.chatLog = el("div", { class: "chat-log" });
    this.listBox = el("div", { class: "suggestion-list" });
    this.listBox.addEventListener("scroll", () => this.renderSuggestions());

    const search = el("input", { type: "text", placeholder: "Search the argument base" });
    const searchButton = el("button", {}, "Search");
    searchButton.addEventListener("click", () => {
      const terms = search.value.trim().split(/\s+/).filter(Boolean);
      if (terms.length) this.context.channel.send({ type: "search", terms });
    });

    const filterBox = el("div", { class: "filter-toggle" });
    for (const stance of ["pro", "con", "off"] as FilterStance[]) {
      const button = el("button", { "data-stance": stance }, stance);
      button.addEventListener("click", () => {
        this.panel.filter = stance;
        this.context.channel.send({ type: "filter", stance });
      });
      filterBox.append(button);
    }

    this.composerBox = el("textarea", { class: "composer", rows: "3" });
    this.composerBox.addEventListener("input", () => {
      this.composer.setText(this.composerBox.value);
    });

    const hedgeBox = el("div", { class: "hedges" });
    for (const hedge of this.context.hedges) {
      const chip = el("button", { class: "hedge-chip" }, hedge);
      chip.addEventListener("click", () => {
        this.composer.insertHedge(hedge);
        this.composerBox.value = this.composer.text();
      });
      hedgeBox.append(chip);
    }

    const send = el("button", { class: "send" }, "Send");
    send.addEventListener("click", () => this.sendUtterance());

    this.closeButton = el("button", { class: "close", disabled: "disabled" }, "End session");
    this.closeButton.addEventListener("click", () => {
      this.context.channel.send({ type: "close" });
    });

    root.append(
      el("div", { class: "wizard-layout" },
        el("div", { class: "panel chat" },
          el("div", { class: "chat-header" },
            el("span", { class: "timer" }), this.closeButton),
          this.chatLog,
          hedgeBox,
          this.composerBox,
          send),
        el("div", { class: "panel suggestions" },
          el("div", { class: "toolbar" }, search, searchButton, filterBox),
          this.listBox)),
    );
  }

  sendUtterance(): void {
    const utterance = this.composer.buildUtterance();
    if (!utterance) return; // empty drafts never leave the composer
    this.context.channel.send({ type: "utterance", ...utterance });
    this.appendMessage("wizard", utterance.text);
    this.composer.clear();
    this.composerBox.value = "";
  }

  /** Click handler for a suggestion row: record the selection, prefill. */
  pickSuggestion(argumentId: string): void {
    const item = this.panel.select(argumentId);
    if (!item) return;
    this.context.channel.send({
      type: "select",
      argument_id: item.argument_id,
      rank: item.rank,
    });
    this.composer.prefill(item);
    this.composerBox.value = this.composer.text();
  }

  private renderSuggestions(): void {
    const rows = this.panel.rows();
    const window = this.panel.window(
      this.listBox.scrollTop, this.listBox.clientHeight || PANEL_CAP * ROW_PX, ROW_PX);
    clear(this.listBox);
    this.listBox.append(el("div", { style: `height:${window.topPadPx}px` }));
    for (const item of rows.slice(window.start, window.end)) {
      const row = el("div", { class: "suggestion-row", "data-id": item.argument_id },
        el("span", { class: `badge ${item.stance}` }, item.stance),
        el("span", { class: "rank" }, `#${item.rank}`),
        el("span", { class: "text" }, item.text),
        el("span", { class: "score" }, item.final_score.toFixed(2)));
      row.addEventListener("click", () => this.pickSuggestion(item.argument_id));
      this.listBox.append(row);
    }
    this.listBox.append(el("div", { style: `height:${window.bottomPadPx}px` }));
  }

  private refreshTimer(): void {
    const badge = this.context.root.querySelector(".timer");
    if (badge) badge.textContent = this.timer.display();
    this.closeButton.disabled = !this.timer.closeEnabled();
  }

  private appendMessage(speaker: "participant" | "wizard", text: string): void {
    this.chatLog.append(el("div", { class: `msg ${speaker}` }, text));
    this.chatLog.scrollTo(0, this.chatLog.scrollHeight);
  }
}
