/**
 * DOM rendering for the annotation screen. All state lives in the
 * controller; this module just projects it into HTML and wires events.
 */

import { CandidateView } from "./api.js";
import {
  AnnotationController,
  NO_SENTIMENT_OPTION,
  WRITE_IN_OPTION,
} from "./controller.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function quadTable(candidate: CandidateView): HTMLElement {
  const table = el("table", "quads");
  const head = el("tr");
  for (const col of ["category", "sentiment", "aspect", "opinion"]) {
    head.appendChild(el("th", undefined, col));
  }
  table.appendChild(head);
  if (candidate.quads.length === 0) {
    const row = el("tr");
    const cell = el("td", "empty", "no sentiment (NONE)");
    cell.colSpan = 4;
    row.appendChild(cell);
    table.appendChild(row);
  }
  for (const quad of candidate.quads) {
    const row = el("tr");
    for (const value of [quad.category, quad.sentiment, quad.aspect, quad.opinion]) {
      row.appendChild(el("td", undefined, value));
    }
    table.appendChild(row);
  }
  return table;
}

export function render(root: HTMLElement, controller: AnnotationController): void {
  root.replaceChildren();

  const header = el("div", "header");
  header.appendChild(el("span", "who",
    `${controller.annotatorId} (${controller.role})`));
  header.appendChild(el("span", "progress", controller.progressSummary()));
  root.appendChild(header);

  if (controller.notice) {
    const notice = el("div", "notice", controller.notice);
    const dismiss = el("button", undefined, "dismiss");
    dismiss.onclick = () => {
      controller.notice = null;
      render(root, controller);
    };
    notice.appendChild(dismiss);
    root.appendChild(notice);
  }

  const screen = controller.screen;
  if (screen.kind === "loading") {
    root.appendChild(el("p", undefined, "loading..."));
    return;
  }
  if (screen.kind === "connection-error") {
    root.appendChild(el("p", "error", screen.message));
    const retry = el("button", undefined, "retry");
    retry.onclick = () => void controller.loadNext().then(() => render(root, controller));
    root.appendChild(retry);
    return;
  }
  if (screen.kind === "complete") {
    root.appendChild(el("h2", undefined, "Batch complete"));
    root.appendChild(el("p", undefined, controller.progressSummary()));
    return;
  }

  const task = screen.task;
  root.appendChild(el("h2", undefined, task.review.text));
  root.appendChild(el("p", "meta", `${task.task_id} · ${task.batch_id}`));

  for (const vote of controller.priorVotes()) {
    root.appendChild(el("p", "prior-vote",
      `${vote.annotator_id} chose option ${vote.option}` +
      (vote.write_in ? ` ("${vote.write_in}")` : "")));
  }

  const options = el("div", "options");
  for (const candidate of task.candidates) {
    options.appendChild(optionRow(controller, root, candidate.option,
      `option ${candidate.option}`, quadTable(candidate)));
  }
  options.appendChild(optionRow(controller, root, WRITE_IN_OPTION,
    "option 5: none fit, write one in"));
  options.appendChild(optionRow(controller, root, NO_SENTIMENT_OPTION,
    "option 6: no (inferable) sentiment"));
  root.appendChild(options);

  if (controller.selectedOption === WRITE_IN_OPTION) {
    const editor = el("div", "write-in");
    const input = el("input");
    input.value = controller.writeIn;
    input.placeholder = "category | sentiment | aspect | opinion ; ...";
    input.oninput = () => {
      controller.setWriteIn(input.value);
      validation.textContent = controller.writeInValidation().message;
      submit.disabled = !controller.canSubmit();
    };
    const validation = el("p", "validation",
      controller.writeInValidation().message);
    editor.appendChild(input);
    editor.appendChild(validation);
    root.appendChild(editor);
  }

  if (controller.inlineError) {
    root.appendChild(el("p", "error", controller.inlineError));
  }

  const submit = el("button", "submit", "submit vote");
  submit.disabled = !controller.canSubmit();
  submit.onclick = () => void controller.submit().then(() => render(root, controller));
  root.appendChild(submit);
}

function optionRow(
  controller: AnnotationController,
  root: HTMLElement,
  option: number,
  labelText: string,
  detail?: HTMLElement,
): HTMLElement {
  const row = el("label", "option");
  const radio = el("input");
  radio.type = "radio";
  radio.name = "option";
  radio.checked = controller.selectedOption === option;
  radio.onchange = () => {
    controller.selectOption(option);
    render(root, controller);
  };
  row.appendChild(radio);
  row.appendChild(el("span", undefined, labelText));
  if (detail) row.appendChild(detail);
  return row;
}
