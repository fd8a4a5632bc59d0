// Entry point. Expects ?session=<id>&role=wizard|participant&token=<token>
// &topic=<topic>&mode=<mode>; the wire schema is fetched from the server.

import { ChatChannel, SessionApi } from "./channel.js";
import { ParticipantView } from "./participantView.js";
import { WireSchema } from "./protocol.js";
import { WizardConsole } from "./wizardConsole.js";

const DEFAULT_HEDGES = [
  "It could be argued that",
  "I see what you mean, but",
  "That's a fair point, although",
];

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session") ?? "";
  const role = (params.get("role") ?? "participant") as "participant" | "wizard";
  const token = params.get("token") ?? "";
  const topic = params.get("topic") ?? "veganism";
  const mode = params.get("mode") ?? "wizard";

  const httpBase = window.location.origin;
  const wsBase = httpBase.replace(/^http/, "ws");
  // The build copies the shared schema next to the compiled modules.
  const schemaUrl = new URL("./wire_schema.json", import.meta.url);
  const schema = new WireSchema(await (await fetch(schemaUrl)).json());

  const channel = new ChatChannel({
    baseUrl: wsBase,
    sessionId,
    role,
    token,
    schema,
    socketFactory: (url) => new WebSocket(url) as unknown as never,
  });

  const root = document.getElementById("app")!;
  if (role === "wizard") {
    new WizardConsole({ channel, hedges: DEFAULT_HEDGES, root }).mount();
  } else {
    new ParticipantView({
      api: new SessionApi(httpBase),
      channel,
      sessionId,
      token,
      topic,
      botMode: mode !== "wizard",
      root,
    }).mount();
  }
}

boot().catch((err) => {
  document.body.textContent = `failed to start: ${err}`;
});
