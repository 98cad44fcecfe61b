import { SessionApi } from "./api.js";
import { SessionController } from "./controller.js";
import { App } from "./view.js";

const api = new SessionApi("");
const controller = new SessionController(api);
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
const app = new App(root, controller);

// Refresh-safe: a session id in the hash resumes that session.
const fromHash = window.location.hash.replace(/^#/, "");
if (fromHash) {
	void controller.resume(fromHash);
}
controller.onChange(() => {
	const id = controller.state.sessionId;
	if (id) window.location.hash = id;
});

app.render();
