// HTTP client for the translation gateway.  Everything here mirrors the
// gateway's wire schema one to one; no other coupling to the server exists.

export type LanguageCode = "en" | "fr" | "de" | "it" | "es";

/** Every served pair has English on one side. */
export const SUPPORTED_PAIRS: ReadonlyArray<readonly [LanguageCode, LanguageCode]> = [
  ["en", "fr"], ["fr", "en"],
  ["en", "de"], ["de", "en"],
  ["en", "it"], ["it", "en"],
  ["en", "es"], ["es", "en"],
];

export function isSupportedPair(source: string, target: string): boolean {
  return SUPPORTED_PAIRS.some(([s, t]) => s === source && t === target);
}

export function pairLabel(source: string, target: string): string {
  return `${source}-${target}`;
}

export interface TranslationRequest {
  request_id?: string;
  text: string;
  source_lang: string;
  target_lang: string;
}

export interface StageTimings {
  pipeline_ms: number;
  backend_ms: number;
  total_ms: number;
}

export interface TranslationResponse {
  request_id: string;
  translated_text: string;
  engine_id: string;
  timings: StageTimings;
}

/** Structured error body the gateway returns alongside 4xx/5xx statuses. */
export interface GatewayErrorBody {
  error: string;
  request_id?: string;
  supported_pairs?: string[];
  pair?: string;
  max_bytes?: number;
  stage?: string;
  detail?: string;
}

export type TranslateFailure =
  | { kind: "http"; status: number; body: GatewayErrorBody }
  | { kind: "network"; message: string }
  | { kind: "aborted" };

export type TranslateOutcome =
  | { ok: true; response: TranslationResponse }
  | { ok: false; failure: TranslateFailure };

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  /**
   * @param baseUrl Gateway origin, e.g. "http://127.0.0.1:8000".
   * @param fetchImpl Injectable fetch, replaced by a stub in tests.
   */
  constructor(baseUrl: string, fetchImpl: FetchLike = (...args) => fetch(...args)) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl;
  }

  async translate(
    request: TranslationRequest,
    signal?: AbortSignal,
  ): Promise<TranslateOutcome> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/translate`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(request),
        signal,
      });
    } catch (err) {
      if (signal?.aborted || (err instanceof DOMException && err.name === "AbortError")) {
        return { ok: false, failure: { kind: "aborted" } };
      }
      const message = err instanceof Error ? err.message : String(err);
      return { ok: false, failure: { kind: "network", message } };
    }
    if (!response.ok) {
      let body: GatewayErrorBody;
      try {
        body = (await response.json()) as GatewayErrorBody;
      } catch {
        body = { error: "unreadable_error", detail: `status ${response.status}` };
      }
      return { ok: false, failure: { kind: "http", status: response.status, body } };
    }
    const payload = (await response.json()) as TranslationResponse;
    return { ok: true, response: payload };
  }

  async health(): Promise<{ workers: unknown; supported_pairs: string[] }> {
    const response = await this.fetchImpl(`${this.baseUrl}/health`);
    if (!response.ok) {
      throw new Error(`gateway health check failed with status ${response.status}`);
    }
    return response.json();
  }
}

/** Human-readable banner text for a failed translation call. */
export function describeFailure(
  failure: TranslateFailure,
  source: string,
  target: string,
): string {
  const pair = pairLabel(source, target);
  switch (failure.kind) {
    case "network":
      return `could not reach the translation service (${failure.message}); check the connection and retry`;
    case "aborted":
      return "request cancelled";
    case "http":
      break;
  }
  const body = failure.body;
  switch (body.error) {
    case "unsupported_pair":
      return `translation pair ${pair} is not supported by the gateway`;
    case "no_worker":
      return `no translation service is available for ${body.pair ?? pair} right now; retry shortly`;
    case "text_too_large":
      return `the pasted text exceeds the gateway limit of ${body.max_bytes ?? "?"} bytes`;
    case "backend_failure":
      return `the ${body.pair ?? pair} translation service failed (${body.detail ?? "no detail"})`;
    default:
      return `translation for ${pair} failed with status ${failure.status} (${body.error})`;
  }
}
