import { createApi } from "./api.js";
import { mountApp } from "./app.js";

// Same-origin by default; `?api=http://host:port` points the page at a
// service running elsewhere (CORS on the service side is open).
const base = new URLSearchParams(location.search).get("api") ?? "";
mountApp(document.getElementById("app")!, createApi(base));
