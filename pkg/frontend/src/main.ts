import { FlowClient } from "./api.js";
import { init } from "./app.js";

// Same-origin by default; ?api=http://host:port points elsewhere
// (e.g. a dev proxy or a reverse proxy in front of `stvflow serve`).
const base = new URLSearchParams(location.search).get("api") ?? "";
void init(document.getElementById("app")!, new FlowClient(base));
