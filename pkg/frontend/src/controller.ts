/**
 * Annotation session state machine.
 *
 * Holds everything the screen needs (current task, selection, write-in
 * draft, progress, notices) and enforces the submit rules: no submission
 * without a chosen option, and option 5 only with a write-in that
 * validates against the template. Structurally invalid votes cannot
 * leave this class.
 */

import {
  ApiClient,
  NetworkError,
  Progress,
  Role,
  SubmitResult,
  TaskView,
} from "./api.js";
import { validateWriteIn, WriteInValidation } from "./template.js";

export const WRITE_IN_OPTION = 5;
export const NO_SENTIMENT_OPTION = 6;

export type Screen =
  | { kind: "loading" }
  | { kind: "task"; task: TaskView }
  | { kind: "complete"; progress: Progress | null }
  | { kind: "connection-error"; message: string };

export interface SubmitOutcome {
  submitted: boolean;
  advanced: boolean;
  reason: string;
}

export class AnnotationController {
  screen: Screen = { kind: "loading" };
  selectedOption: number | null = null;
  writeIn = "";
  /** transient banner, e.g. a duplicate-vote rejection */
  notice: string | null = null;
  /** inline problem with the current submission attempt */
  inlineError: string | null = null;
  tasksCompleted = 0;

  constructor(
    private readonly api: ApiClient,
    readonly annotatorId: string,
    readonly role: Role = "annotator",
    readonly batchId?: string,
  ) {}

  /** Fetch the next task. A network failure keeps the draft intact and
   * switches to a retryable error screen. */
  async loadNext(): Promise<void> {
    const draft = this.writeIn;
    try {
      const response = await this.api.nextTask(this.annotatorId, this.role, this.batchId);
      if (response.task === null) {
        this.screen = { kind: "complete", progress: response.progress ?? null };
        this.selectedOption = null;
        this.writeIn = "";
      } else {
        this.screen = { kind: "task", task: response.task };
        this.selectedOption = null;
        this.writeIn = "";
        this.inlineError = null;
      }
    } catch (err) {
      if (!(err instanceof NetworkError)) throw err;
      this.screen = { kind: "connection-error", message: err.message };
      this.writeIn = draft; // retry affordance must not lose the draft
    }
  }

  get currentTask(): TaskView | null {
    return this.screen.kind === "task" ? this.screen.task : null;
  }

  /** Options offered on screen: one per candidate, then write-in (5) and
   * no-sentiment (6). Numbering equals the candidate index served by the
   * service; there is no client-side reordering. */
  availableOptions(): number[] {
    const task = this.currentTask;
    if (!task) return [];
    const candidateOptions = task.candidates.map((c) => c.option);
    return [...candidateOptions, WRITE_IN_OPTION, NO_SENTIMENT_OPTION];
  }

  selectOption(option: number): void {
    if (!this.availableOptions().includes(option)) {
      throw new Error(`option ${option} is not offered for this task`);
    }
    this.selectedOption = option;
    this.inlineError = null;
  }

  setWriteIn(text: string): void {
    this.writeIn = text;
  }

  writeInValidation(): WriteInValidation {
    return validateWriteIn(this.writeIn);
  }

  /** The submit control is enabled only for a complete, valid vote. */
  canSubmit(): boolean {
    if (this.screen.kind !== "task" || this.selectedOption === null) {
      return false;
    }
    if (this.selectedOption === WRITE_IN_OPTION) {
      return this.writeInValidation().valid;
    }
    return true;
  }

  async submit(): Promise<SubmitOutcome> {
    const task = this.currentTask;
    if (!task || !this.canSubmit() || this.selectedOption === null) {
      this.inlineError = this.submitBlockReason();
      return { submitted: false, advanced: false, reason: this.inlineError };
    }
    const vote = {
      task_id: task.task_id,
      annotator_id: this.annotatorId,
      option: this.selectedOption,
      write_in: this.selectedOption === WRITE_IN_OPTION ? this.writeIn : null,
    };
    let result: SubmitResult;
    try {
      result =
        this.role === "adjudicator"
          ? await this.api.submitAdjudication(vote)
          : await this.api.submitVote(vote);
    } catch (err) {
      if (!(err instanceof NetworkError)) throw err;
      this.inlineError = `${err.message} (your draft is preserved; retry)`;
      return { submitted: false, advanced: false, reason: this.inlineError };
    }
    if (result.ok) {
      this.notice = null;
      this.tasksCompleted += 1;
      await this.loadNext();
      return { submitted: true, advanced: true, reason: "" };
    }
    if (result.status === 409) {
      // workflow conflicts (e.g. duplicate vote) are non-blocking: show a
      // notice and move on
      this.notice = result.detail;
      await this.loadNext();
      return { submitted: false, advanced: true, reason: result.detail };
    }
    this.inlineError = result.detail || `submission rejected (${result.status})`;
    return { submitted: false, advanced: false, reason: this.inlineError };
  }

  private submitBlockReason(): string {
    if (this.selectedOption === null) return "choose an option first";
    if (this.selectedOption === WRITE_IN_OPTION) {
      return this.writeInValidation().message;
    }
    return "nothing to submit";
  }

  /** Prior votes, present only on adjudicator screens. */
  priorVotes() {
    return this.currentTask?.votes ?? [];
  }

  progressSummary(): string {
    if (this.screen.kind === "complete") {
      const progress = this.screen.progress;
      if (progress) {
        return `batch complete: ${progress.total_resolved}/${progress.total_tasks} tasks resolved`;
      }
      return "batch complete";
    }
    return `${this.tasksCompleted} task(s) submitted this session`;
  }
}
