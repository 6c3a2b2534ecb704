/** Browser entry point: a small login form, then the dashboard. */

import { ApiClient } from "./api.js";
import { DashboardApp } from "./app.js";
import { EditBufferStore } from "./state.js";

function startDashboard(root: HTMLElement, baseUrl: string, token: string, courseId: string): void {
  const client = new ApiClient(baseUrl.replace(/\/$/, ""), token);
  const app = new DashboardApp(root, client, {
    courseId: courseId || undefined,
    buffers: new EditBufferStore(window.localStorage),
  });
  void app.start();
}

export function mount(root: HTMLElement): void {
  root.innerHTML = `
    <form id="login" class="login">
      <h1>Review dashboard</h1>
      <label>Service URL <input name="base" value="http://127.0.0.1:8787" /></label>
      <label>Session token <input name="token" type="password" required /></label>
      <label>Course (optional) <input name="course" placeholder="CS180" /></label>
      <button type="submit">Sign in</button>
    </form>`;
  const form = root.querySelector<HTMLFormElement>("#login");
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    startDashboard(
      root,
      String(data.get("base") ?? ""),
      String(data.get("token") ?? ""),
      String(data.get("course") ?? ""),
    );
  });
}

const rootEl = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootEl) {
  mount(rootEl);
}
