/**
 * The wizard state machine. Its state is a pure function of the server's
 * responses: every transition applies one server reply, so replaying the
 * same answer script against the same service reproduces the same states
 * and the same final economy document, bit for bit.
 */

import {
  AnswerResponse,
  ApiError,
  QuestionDocument,
  RentDivClient,
  SessionConfig,
  SolveResponse,
} from './api.js';
import { validateAnswer } from './views.js';

export type Phase = 'configuring' | 'asking' | 'ready-to-solve' | 'solved';

export interface SessionView {
  phase: Phase;
  sessionId: string | null;
  question: QuestionDocument | null;
  /** agents that have finished answering */
  progress: Record<string, 'pending' | 'active' | 'done'>;
  validationError: string | null;
  serverError: string | null;
  result: SolveResponse | null;
}

export interface AnswerScriptEntry {
  agent: string;
  payload: Record<string, unknown>;
}

export class Wizard {
  private view: SessionView;
  private agents: string[] = [];
  readonly script: AnswerScriptEntry[] = [];

  constructor(private readonly client: RentDivClient) {
    this.view = {
      phase: 'configuring',
      sessionId: null,
      question: null,
      progress: {},
      validationError: null,
      serverError: null,
      result: null,
    };
  }

  snapshot(): SessionView {
    return {
      ...this.view,
      progress: { ...this.view.progress },
    };
  }

  private setQuestion(question: QuestionDocument | null, done: boolean) {
    this.view.question = question;
    this.view.phase = done ? 'ready-to-solve' : 'asking';
    // Agents answer in order, so the active agent splits done from pending.
    const activeIdx = done || !question ? this.agents.length : this.agents.indexOf(question.agent);
    const progress: Record<string, 'pending' | 'active' | 'done'> = {};
    this.agents.forEach((agent, idx) => {
      progress[agent] = idx < activeIdx ? 'done' : idx === activeIdx ? 'active' : 'pending';
    });
    this.view.progress = progress;
  }

  async start(config: SessionConfig): Promise<SessionView> {
    this.agents = [...config.agents];
    const created = await this.client.createSession(config);
    this.view.sessionId = created.session_id;
    this.view.serverError = null;
    this.setQuestion(created.question, false);
    return this.snapshot();
  }

  /**
   * Validate locally, then submit. A locally invalid answer never reaches
   * the server; a server rejection leaves the question in place so the
   * client can never advance past a rejected answer.
   */
  async submit(raw: Record<string, string>): Promise<SessionView> {
    const question = this.view.question;
    if (!question || this.view.sessionId === null) {
      throw new Error('no active question');
    }
    const verdict = validateAnswer(question, raw);
    if (!verdict.ok) {
      this.view.validationError = verdict.error;
      return this.snapshot();
    }
    this.view.validationError = null;
    const payload = buildPayload(question, raw);
    let reply: AnswerResponse;
    try {
      reply = await this.client.answer(this.view.sessionId, question.agent, payload);
    } catch (error) {
      if (error instanceof ApiError) {
        this.view.serverError = `${error.code}: ${error.message}`;
        return this.snapshot();
      }
      throw error;
    }
    this.view.serverError = null;
    this.script.push({ agent: question.agent, payload });
    this.setQuestion(reply.question, reply.done);
    return this.snapshot();
  }

  async solve(objective?: string): Promise<SessionView> {
    if (this.view.sessionId === null) throw new Error('no session');
    this.view.result = await this.client.solveSession(this.view.sessionId, objective);
    this.view.phase = 'solved';
    return this.snapshot();
  }
}

export function buildPayload(
  question: QuestionDocument,
  raw: Record<string, string>,
): Record<string, unknown> {
  switch (question.kind) {
    case 'rents': {
      const rooms = question.fields.rooms ?? [];
      return { rents: Object.fromEntries(rooms.map((room) => [room, raw[room]])) };
    }
    case 'budget':
      return { budget: raw.budget };
    case 'rho_equivalent':
      return { equivalent: raw.equivalent };
    case 'rho_self_assessment':
      return { assessment: raw.assessment };
  }
}

/**
 * Drive a fresh session through a recorded answer script. Used by the replay
 * test and handy for demos: the resulting economy document is a pure
 * function of (config, script).
 */
export async function replayScript(
  client: RentDivClient,
  config: SessionConfig,
  script: AnswerScriptEntry[],
  objective?: string,
): Promise<SolveResponse> {
  const created = await client.createSession(config);
  for (const entry of script) {
    const reply = await client.answer(created.session_id, entry.agent, entry.payload);
    if (!reply.accepted) throw new Error('script entry rejected');
  }
  return client.solveSession(created.session_id, objective);
}
