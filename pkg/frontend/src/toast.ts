/** Transient notification strip, with an optional action button for
recoverable errors (e.g. a stale dendrogram offering re-preprocess). */

export interface ToastAction {
  label: string;
  run: () => void;
}

const AUTO_DISMISS_MS = 6000;

export function toast(
  container: HTMLElement,
  message: string,
  action?: ToastAction,
): HTMLElement {
  const el = document.createElement("div");
  el.className = "toast";
  const text = document.createElement("span");
  text.textContent = message;
  el.appendChild(text);

  if (action) {
    const button = document.createElement("button");
    button.textContent = action.label;
    button.addEventListener("click", () => {
      el.remove();
      action.run();
    });
    el.appendChild(button);
  }

  const close = document.createElement("button");
  close.textContent = "×";
  close.className = "toast-close";
  close.addEventListener("click", () => el.remove());
  el.appendChild(close);

  container.appendChild(el);
  setTimeout(() => el.remove(), AUTO_DISMISS_MS);
  return el;
}
