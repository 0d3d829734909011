/**
 * Thin client for the annotation service HTTP API.
 *
 * The UI talks to the service exclusively through this module; the only
 * configuration is the base URL (and an optional bearer token).
 */

export interface CandidateView {
  option: number;
  text: string;
  confidence: number;
  quads: { aspect: string; category: string; opinion: string; sentiment: string }[];
}

export interface PriorVote {
  annotator_id: string;
  option: number;
  write_in: string | null;
}

export interface TaskView {
  task_id: string;
  batch_id: string;
  review: { id: string; text: string; domain: string };
  candidates: CandidateView[];
  option_count: number;
  votes?: PriorVote[];
}

export interface Progress {
  batches: Record<
    string,
    { total: number; resolved: number; needs_adjudication: number; votes: number }
  >;
  total_tasks: number;
  total_resolved: number;
}

export interface NextTaskResponse {
  task: TaskView | null;
  batch_complete?: boolean;
  progress?: Progress;
}

export interface VoteBody {
  task_id: string;
  annotator_id: string;
  option: number;
  write_in: string | null;
}

export interface SubmitResult {
  ok: boolean;
  status: number;
  detail: string;
  resolution?: { resolved_by: string; resolution: string } | null;
}

export type Role = "annotator" | "adjudicator";

export class NetworkError extends Error {}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string | null = null,
  ) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (this.token) headers["authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}${path}`, {
        headers: this.headers(),
        ...init,
      });
    } catch (err) {
      throw new NetworkError(`cannot reach the annotation service: ${err}`);
    }
    return response;
  }

  async nextTask(annotatorId: string, role: Role, batchId?: string): Promise<NextTaskResponse> {
    const params = new URLSearchParams({ annotator_id: annotatorId, role });
    if (batchId) params.set("batch_id", batchId);
    const response = await this.request(`/tasks/next?${params}`);
    if (!response.ok) {
      throw new NetworkError(`tasks/next failed with status ${response.status}`);
    }
    return (await response.json()) as NextTaskResponse;
  }

  async taskDetail(taskId: string, role: Role): Promise<Record<string, unknown>> {
    const response = await this.request(`/tasks/${taskId}?role=${role}`);
    if (!response.ok) {
      throw new NetworkError(`tasks/${taskId} failed with status ${response.status}`);
    }
    return (await response.json()) as Record<string, unknown>;
  }

  private async post(path: string, body: unknown): Promise<SubmitResult> {
    const response = await this.request(path, {
      method: "POST",
      body: JSON.stringify(body),
    });
    let payload: { detail?: string; resolution?: SubmitResult["resolution"] } = {};
    try {
      payload = await response.json();
    } catch {
      // non-JSON error body; detail stays generic
    }
    return {
      ok: response.ok,
      status: response.status,
      detail: payload.detail ?? "",
      resolution: payload.resolution ?? null,
    };
  }

  submitVote(vote: VoteBody): Promise<SubmitResult> {
    return this.post("/votes", vote);
  }

  submitAdjudication(vote: VoteBody & { override?: boolean }): Promise<SubmitResult> {
    return this.post("/adjudications", vote);
  }

  async progress(): Promise<Progress> {
    const response = await this.request("/progress");
    if (!response.ok) {
      throw new NetworkError(`progress failed with status ${response.status}`);
    }
    return (await response.json()) as Progress;
  }
}
