/**
 * Typed client for the review service JSON API. The client never caches
 * or transforms server state beyond shaping records into views; every
 * mutation goes through the decision endpoint.
 */

export type Status = "pending" | "flagged" | "accepted" | "rejected" | "refined";

export type Decision = "accept" | "reject";

export interface ScreeningStats {
  semi_fraction: number;
  attached_noise_fraction: number;
  removed_fraction: number;
}

/** Raw sample record as serialized by the server. */
export interface SampleRecord {
  id: string;
  paths: Record<string, string>;
  composites: string[];
  status: Status;
  screening: ScreeningStats | null;
  metrics: Record<string, number> | null;
  chroma: Record<string, number> | null;
  decided_by: "auto" | "human" | null;
  error: string | null;
  created_at: string;
  updated_at: string;
}

/** What the console renders: the record plus its three inspection images. */
export interface SampleView {
  id: string;
  status: Status;
  screening: ScreeningStats | null;
  decidedBy: "auto" | "human" | null;
  images: {
    rgb: string;
    alpha: string;
    inverse: string;
  };
}

export interface StatsResponse {
  counts: Record<Status, number>;
  total: number;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly httpStatus: number,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let message = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { error?: string };
    if (body.error) message = body.error;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(message, response.status);
}

/** The surface the console needs; ApiClient is the HTTP implementation. */
export interface ReviewApi {
  imageUrl(id: string, kind: "rgb" | "alpha" | "inverse" | "refined"): string;
  listSamples(status: Status | "", offset: number, limit: number): Promise<SampleView[]>;
  decide(id: string, decision: Decision): Promise<SampleRecord>;
  stats(): Promise<StatsResponse>;
}

export class ApiClient implements ReviewApi {
  constructor(
    private readonly baseUrl = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  imageUrl(id: string, kind: "rgb" | "alpha" | "inverse" | "refined"): string {
    return `${this.baseUrl}/api/samples/${encodeURIComponent(id)}/image?kind=${kind}`;
  }

  toView(record: SampleRecord): SampleView {
    return {
      id: record.id,
      status: record.status,
      screening: record.screening,
      decidedBy: record.decided_by,
      images: {
        rgb: this.imageUrl(record.id, "rgb"),
        alpha: this.imageUrl(record.id, "alpha"),
        inverse: this.imageUrl(record.id, "inverse"),
      },
    };
  }

  async listSamples(status: Status | "", offset: number, limit: number): Promise<SampleView[]> {
    const filter = status ? `status=${status}&` : "";
    const response = await this.fetchFn(
      `${this.baseUrl}/api/samples?${filter}offset=${offset}&limit=${limit}`,
    );
    if (!response.ok) await parseError(response);
    const records = (await response.json()) as SampleRecord[];
    return records.map((r) => this.toView(r));
  }

  async decide(id: string, decision: Decision): Promise<SampleRecord> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/samples/${encodeURIComponent(id)}/decision`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ decision }),
      },
    );
    if (!response.ok) await parseError(response);
    return (await response.json()) as SampleRecord;
  }

  async stats(): Promise<StatsResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/api/stats`);
    if (!response.ok) await parseError(response);
    return (await response.json()) as StatsResponse;
  }
}
