import { ApiClient } from "./api.js";
import { mountApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "http://127.0.0.1:8000";
const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app element");
}
mountApp(document, root, new ApiClient(base));
