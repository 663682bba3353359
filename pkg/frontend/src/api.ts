/** Typed client for the audit service HTTP API. */

export interface ColumnSummary {
  name: string;
  kind: "continuous" | "categorical";
  min?: number;
  max?: number;
  values?: string[];
}

export interface DatasetSummary {
  dataset_id: string;
  columns: ColumnSummary[];
  n: number;
}

export interface JobConfig {
  target: string;
  lambda?: number;
  alpha?: number;
  correction?: "none" | "bonferroni";
  k_continuous?: number;
  k_target?: number;
  max_antecedents?: number;
  whitelist?: string[];
  blacklist?: string[];
  hide_insignificant?: boolean;
}

export interface RuleEntry {
  text: string;
  status: "significant" | "not-significant" | "removed";
  support: number;
  leverage: number;
  priority: number;
  provenance: string;
  consequent_index: number;
  beta: number | null;
  beta_debiased: number | null;
  z: number | null;
  p: number | null;
  removal_reason?: string;
}

export interface Report {
  schema_version: number;
  config: Record<string, unknown> & { target: string };
  vocabulary: {
    target: string;
    variables: Record<
      string,
      { kind: string; labels: string[]; peaks?: number[]; min?: number; max?: number }
    >;
  };
  n: number;
  intercept: number;
  rules: RuleEntry[];
  metrics: { MAPE: number | null; RMSE: number; R2: number };
  warnings: string[];
}

export interface JobRecord {
  id: string;
  state: "queued" | "running" | "done" | "failed";
  dataset_id: string;
  config: Record<string, unknown>;
  error?: string;
  report?: Report;
}

export interface TraceEntry {
  record_index: number;
  rho: number;
  record: Record<string, unknown>;
}

export interface Inconsistency {
  kind: "conflicting" | "specializing";
  rule_a: string;
  rule_b: string;
  detail: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let code = "http_error";
    let message = `${resp.status} ${resp.statusText}`;
    try {
      const body = await resp.json();
      if (body?.error) {
        code = body.error.code ?? code;
        message = body.error.message ?? message;
      }
    } catch {
      /* non-JSON error body; keep the status line */
    }
    throw new ApiError(resp.status, code, message);
  }
  return (await resp.json()) as T;
}

export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  uploadDataset(csv: Blob | string): Promise<DatasetSummary> {
    return this.fetchImpl(`${this.base}/api/datasets`, {
      method: "POST",
      body: csv,
      headers: { "content-type": "text/csv" },
    }).then((r) => unwrap<DatasetSummary>(r));
  }

  submitJob(datasetId: string, config: JobConfig): Promise<{ job_id: string }> {
    return this.fetchImpl(`${this.base}/api/jobs`, {
      method: "POST",
      body: JSON.stringify({ dataset_id: datasetId, config }),
      headers: { "content-type": "application/json" },
    }).then((r) => unwrap<{ job_id: string }>(r));
  }

  getJob(jobId: string): Promise<JobRecord> {
    return this.fetchImpl(`${this.base}/api/jobs/${encodeURIComponent(jobId)}`).then((r) =>
      unwrap<JobRecord>(r),
    );
  }

  trace(jobId: string, rule: string, top = 10): Promise<TraceEntry[]> {
    const params = new URLSearchParams({ rule, top: String(top) });
    return this.fetchImpl(
      `${this.base}/api/jobs/${encodeURIComponent(jobId)}/trace?${params}`,
    ).then((r) => unwrap<TraceEntry[]>(r));
  }

  inconsistencies(
    jobId: string,
    betaThreshold = 0,
    onlySignificant = false,
  ): Promise<Inconsistency[]> {
    const params = new URLSearchParams({
      beta_threshold: String(betaThreshold),
      only_significant: String(onlySignificant),
    });
    return this.fetchImpl(
      `${this.base}/api/jobs/${encodeURIComponent(jobId)}/inconsistencies?${params}`,
    ).then((r) => unwrap<Inconsistency[]>(r));
  }

  reportUrl(jobId: string): string {
    return `${this.base}/api/jobs/${encodeURIComponent(jobId)}/report.json`;
  }

  /** Poll a job until it leaves the queue; resolves on done, rejects on failed. */
  async waitForJob(
    jobId: string,
    intervalMs = 1000,
    onUpdate?: (record: JobRecord) => void,
  ): Promise<JobRecord> {
    for (;;) {
      const record = await this.getJob(jobId);
      onUpdate?.(record);
      if (record.state === "done") return record;
      if (record.state === "failed") {
        throw new ApiError(500, "job_failed", record.error ?? "job failed");
      }
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}
