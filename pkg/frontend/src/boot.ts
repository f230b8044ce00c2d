import { ServiceClient } from "./api.js";
import { createApp } from "./main.js";

// Entry point for the browser. Route and session come from the URL:
//   index.html#/judge?session=s1&annotator=alice
//   index.html#/dashboard?session=s1
// The service is same-origin by default (server.mjs proxies /sessions);
// an explicit ?api=http://host:port overrides it.

function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;

  const hash = window.location.hash.replace(/^#\/?/, "");
  const [route, query = ""] = hash.split("?", 2);
  const params = new URLSearchParams(query);
  const api = params.get("api") ?? "";
  const session = params.get("session") ?? "";
  const annotator = params.get("annotator") ?? "";
  const view = route === "dashboard" ? "dashboard" : "judge";

  if (!session || (view === "judge" && !annotator)) {
    root.textContent =
      "missing parameters: use #/judge?session=ID&annotator=NAME or #/dashboard?session=ID";
    return;
  }

  const app = createApp({
    root,
    client: new ServiceClient(api),
    storage: window.localStorage,
    win: window,
    view,
    session,
    annotator,
  });
  void app.start();
  window.addEventListener("hashchange", () => window.location.reload());
}

boot();
