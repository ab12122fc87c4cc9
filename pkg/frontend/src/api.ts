/**
 * Typed client for the rent division service. All numeric fields travel as
 * exact rational strings; this module never converts them to floats.
 */

export interface AgentDocument {
  id: string;
  values: Record<string, string>;
  budget: string;
  rho: string;
}

export interface EconomyDocument {
  agents: AgentDocument[];
  rooms: string[];
  total_rent: string;
  rho_menu: string[];
  rho_bar: string;
}

export interface AllocationDocument {
  assignment: Record<string, string>;
  rents: Record<string, string>;
}

export interface CertificateDocument {
  kind?: string;
  ok?: boolean;
  is_maxmin?: boolean;
  envy_free: boolean;
  extremal_agents?: string[];
  argmin_agents?: string[];
  failing_agent: string | null;
}

export interface SolveResponse {
  allocation: AllocationDocument;
  objective_value: string;
  certificate: CertificateDocument;
  utilities: Record<string, string>;
  economy?: EconomyDocument;
}

export interface QuestionDocument {
  agent: string;
  kind: 'rents' | 'budget' | 'rho_equivalent' | 'rho_self_assessment';
  prompt: string;
  fields: {
    rooms?: string[];
    sum?: string;
    minimum?: string;
    probe?: string;
    overage?: string;
    options?: string[];
    range?: [string, string];
  };
}

export interface SessionCreated {
  session_id: string;
  question: QuestionDocument;
}

export interface AnswerResponse {
  accepted: boolean;
  done: boolean;
  question: QuestionDocument | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message ?? `request failed (${status})`);
    this.code = body.code ?? 'unknown';
    this.status = status;
  }
}

export interface SessionConfig {
  agents: string[];
  rooms: string[];
  total_rent: string;
  rho_menu: string[];
  rho_bar: string;
  case3_statistic?: string;
}

export class RentDivClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, payload as ApiErrorBody);
    }
    return payload as T;
  }

  createSession(config: SessionConfig): Promise<SessionCreated> {
    return this.request('POST', '/v1/sessions', config);
  }

  getQuestion(sessionId: string): Promise<{ done: boolean; question: QuestionDocument | null }> {
    return this.request('GET', `/v1/sessions/${sessionId}/question`);
  }

  answer(sessionId: string, agent: string, payload: Record<string, unknown>): Promise<AnswerResponse> {
    return this.request('POST', `/v1/sessions/${sessionId}/answer`, { agent, payload });
  }

  solveSession(sessionId: string, objective?: string): Promise<SolveResponse> {
    return this.request('POST', `/v1/sessions/${sessionId}/solve`, objective ? { objective } : {});
  }

  solve(economy: EconomyDocument, objective?: string): Promise<SolveResponse> {
    return this.request('POST', '/v1/solve', { economy, objective });
  }
}
