// Participant flow: pre-questionnaire (stance + seven Likert items) ->
// chat pane -> post-questionnaire with experience ratings and an optional
// free-text feedback box.

import { ChatChannel, SessionApi } from "./channel.js";
import { clear, el, likertRow, toast } from "./dom.js";
import { ServerFrame } from "./protocol.js";
import { ExperienceFormModel, OUM_ITEMS, OumFormModel } from "./questionnaire.js";
import { TimerModel } from "./timer.js";

export interface ParticipantContext {
  api: SessionApi;
  channel: ChatChannel;
  sessionId: string;
  token: string;
  topic: string;
  botMode: boolean;
  root: HTMLElement;
}

export class ParticipantView {
  private timer = new TimerModel();
  private chatLog!: HTMLElement;
  private postShown = false;

  constructor(private readonly context: ParticipantContext) {}

  mount(): void {
    this.renderPreForm();
    this.context.channel.on("*", (frame) => this.onFrame(frame));
  }

  private onFrame(frame: ServerFrame): void {
    if (frame.type === "utterance") {
      this.appendMessage("agent", frame.text);
    } else if (frame.type === "phase") {
      this.timer.applyPhase(frame);
      if (frame.value === "closed" && !this.postShown) {
        this.postShown = true;
        this.renderPostForm();
      }
    } else if (frame.type === "error") {
      toast(`${frame.code}: ${frame.detail ?? ""}`);
    }
  }

  private renderPreForm(): void {
    const form = new OumFormModel(this.context.topic, true);
    const { root } = this.context;
    clear(root);

    const panel = el("div", { class: "panel pre-form" },
      el("h2", {}, `Before we start: your view on ${this.context.topic}`));

    const stanceRow = el("div", { class: "stance-select" });
    for (const option of form.stanceOptions()) {
      const input = el("input", { type: "radio", name: "stance", value: option.value });
      input.addEventListener("change", () => {
        form.stance = option.value;
        renderItems();
      });
      stanceRow.append(el("label", {}, input, option.label));
    }
    panel.append(stanceRow);

    const items = el("div", { class: "oum-items" });
    panel.append(items);

    const renderItems = () => {
      clear(items);
      const opposite =
        form.stanceOptions().find((o) => o.value === form.stance)?.opposite ??
        "hold the opposite view";
      for (const item of OUM_ITEMS) {
        items.append(
          el("div", { class: "item", "data-item": item.id },
            el("p", {}, item.label.replace("{opposite}", opposite)),
            likertRow(`pre-${item.id}`, (value) => form.setRating(item.id, value))),
        );
      }
    };
    renderItems();

    const errors = el("div", { class: "inline-errors" });
    const submit = el("button", {}, "Start the chat");
    submit.addEventListener("click", async () => {
      const missing = form.missingItems();
      if (missing.length) {
        // inline validation only; nothing goes over the network
        clear(errors);
        errors.append(el("p", {}, `Please answer: ${missing.join(", ")}`));
        return;
      }
      await this.context.api.submitPre(
        this.context.sessionId, this.context.token, form.stance!, form.payload());
      this.renderChat();
      this.context.channel.connect();
    });
    panel.append(errors, submit);
    root.append(panel);
  }

  private renderChat(): void {
    const { root } = this.context;
    clear(root);
    this.chatLog = el("div", { class: "chat-log" });
    const input = el("input", { type: "text", placeholder: "Say something on topic" });
    const send = el("button", {}, "Send");
    const timerBox = el("span", { class: "timer" });
    setInterval(() => { timerBox.textContent = this.timer.display(); }, 500);

    const submit = () => {
      const text = input.value.trim();
      if (!text) return; // never send an empty utterance
      this.context.channel.send({ type: "utterance", text });
      this.appendMessage("participant", text);
      input.value = "";
    };
    send.addEventListener("click", submit);
    input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") submit();
    });

    root.append(
      el("div", { class: "panel chat" },
        el("div", { class: "chat-header" }, `Topic: ${this.context.topic} `, timerBox),
        this.chatLog,
        el("div", { class: "chat-input" }, input, send)),
    );
  }

  private appendMessage(speaker: "participant" | "agent", text: string): void {
    this.chatLog?.append(el("div", { class: `msg ${speaker}` }, text));
    this.chatLog?.scrollTo(0, this.chatLog.scrollHeight);
  }

  private renderPostForm(): void {
    const oum = new OumFormModel(this.context.topic, false);
    const experience = new ExperienceFormModel(this.context.botMode);
    const { root } = this.context;
    clear(root);

    const panel = el("div", { class: "panel post-form" },
      el("h2", {}, "After the chat"));

    for (const item of OUM_ITEMS) {
      panel.append(
        el("div", { class: "item" },
          el("p", {}, item.label.replace("{opposite}", "hold the opposite view")),
          likertRow(`post-${item.id}`, (value) => oum.setRating(item.id, value))),
      );
    }

    panel.append(el("h3", {}, "How was the chat?"));
    for (const metric of experience.metrics()) {
      panel.append(
        el("div", { class: "item" },
          el("p", {}, `The chat was ${metric.replace("_", " ")}`),
          likertRow(`exp-${metric}`, (value) => experience.setRating(metric, value))),
      );
    }

    const feedback = el("textarea", { placeholder: "Any other feedback? (optional)" });
    feedback.addEventListener("input", () => { experience.feedback = feedback.value; });

    const errors = el("div", { class: "inline-errors" });
    const submit = el("button", {}, "Finish");
    submit.addEventListener("click", async () => {
      const missing = [...oum.missingItems(), ...experience.missingMetrics()];
      if (missing.length) {
        clear(errors);
        errors.append(el("p", {}, `Please answer: ${missing.join(", ")}`));
        return;
      }
      await this.context.api.submitPost(
        this.context.sessionId, this.context.token, oum.payload(), experience.payload());
      clear(root);
      root.append(el("div", { class: "panel" }, el("h2", {}, "Thank you!")));
    });
    panel.append(feedback, errors, submit);
    root.append(panel);
  }
}
