import { ApiClient } from "./api.js";
import { DashboardController } from "./controller.js";
import { renderDashboard } from "./render.js";

declare global {
  interface Window {
    REVIEWRANK_API_BASE?: string;
    REVIEWRANK_REVIEW_URL?: string;
  }
}

const api = new ApiClient(window.REVIEWRANK_API_BASE ?? "");
const reviewUrlBase = window.REVIEWRANK_REVIEW_URL ?? "";
const output = document.getElementById("dashboard") as HTMLElement;
const form = document.getElementById("user-form") as HTMLFormElement;
const input = document.getElementById("user-id") as HTMLInputElement;

const controller = new DashboardController(api, (state) => {
  output.innerHTML = renderDashboard(state, reviewUrlBase);
});

form.addEventListener("submit", (event) => {
  event.preventDefault();
  void controller.submit(input.value);
});

output.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.dataset.action === "refresh") {
    void controller.refresh();
  }
});

void controller.start();
