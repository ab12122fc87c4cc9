/**
 * Pure view computations: client-side answer validation (UX only, the
 * server stays authoritative) and the allocation summary with the envy
 * matrix, budget badges, and certificate digest. Every comparison runs on
 * exact rationals parsed straight off the wire.
 */

import { QuestionDocument, SolveResponse } from './api.js';
import { Rational, ZERO, sum } from './rational.js';

export type Validation = { ok: true } | { ok: false; error: string };

function parseInput(raw: string): Rational | null {
  try {
    return Rational.parse(raw);
  } catch {
    return null;
  }
}

/**
 * Pre-check an answer against the question's declared constraints: rent
 * vectors must cover the rooms and sum to the stated total, budgets must be
 * nonnegative numbers, equivalence answers must sit in the offered range
 * (and on the offered options when listed), self-assessments must be one of
 * the offered choices.
 */
export function validateAnswer(
  question: QuestionDocument,
  raw: Record<string, string>,
): Validation {
  switch (question.kind) {
    case 'rents': {
      const rooms = question.fields.rooms ?? [];
      const rents: Rational[] = [];
      for (const room of rooms) {
        const value = parseInput(raw[room] ?? '');
        if (value === null) return { ok: false, error: `rent for ${room} is not a number` };
        rents.push(value);
      }
      const expected = Rational.parse(question.fields.sum ?? '0');
      const total = sum(rents);
      if (!total.eq(expected)) {
        return {
          ok: false,
          error: `rents sum to ${total.toString()}, but the total rent is ${expected.toString()}`,
        };
      }
      return { ok: true };
    }
    case 'budget': {
      const value = parseInput(raw.budget ?? '');
      if (value === null) return { ok: false, error: 'budget is not a number' };
      if (value.lt(ZERO)) return { ok: false, error: 'budget must be at least 0' };
      return { ok: true };
    }
    case 'rho_equivalent': {
      const value = parseInput(raw.equivalent ?? '');
      if (value === null) return { ok: false, error: 'answer is not a number' };
      const [lo, hi] = question.fields.range ?? ['0', '0'];
      if (value.lt(Rational.parse(lo)) || Rational.parse(hi).lt(value)) {
        return { ok: false, error: `answer must lie in [${lo}, ${hi}]` };
      }
      const options = question.fields.options;
      if (options && !options.some((o) => Rational.parse(o).eq(value))) {
        return { ok: false, error: `answer must be one of ${options.join(', ')}` };
      }
      return { ok: true };
    }
    case 'rho_self_assessment': {
      const options = question.fields.options ?? [];
      if (!options.includes(raw.assessment ?? '')) {
        return { ok: false, error: `pick one of ${options.join(', ')}` };
      }
      return { ok: true };
    }
  }
}

export interface AgentRow {
  agent: string;
  room: string;
  rent: string;
  rentDisplay: string;
  utility: string;
  /** present when the assigned rent strictly exceeds the agent's budget */
  overBudgetBy: string | null;
}

export interface AllocationView {
  rows: AgentRow[];
  /** envyMatrix[i][j] = u_i(bundle of j) - u_i(own bundle), as wire strings */
  envyMatrix: Record<string, Record<string, string>>;
  certificateOk: boolean;
  certificateKind: string;
  /** set when any envy matrix entry is positive, which the certified server
   * must never produce */
  integrityWarning: string | null;
  objectiveValue: string;
}

function kinkedUtility(
  values: Record<string, Rational>,
  budget: Rational,
  rho: Rational,
  room: string,
  rent: Rational,
): Rational {
  const overage = rent.sub(budget);
  const penalty = overage.gt(ZERO) ? rho.mul(overage) : ZERO;
  return values[room].sub(rent).sub(penalty);
}

/**
 * Turn a certified solve response into the table the results screen shows.
 * The envy matrix is recomputed client-side from the embedded economy, so a
 * positive off-diagonal entry can only mean the response is inconsistent;
 * that raises the integrity warning rather than rendering silently.
 */
export function renderAllocation(response: SolveResponse): AllocationView {
  const economy = response.economy;
  if (!economy) throw new Error('response carries no economy document');
  const rents: Record<string, Rational> = {};
  for (const [room, rent] of Object.entries(response.allocation.rents)) {
    rents[room] = Rational.parse(rent);
  }
  const rows: AgentRow[] = [];
  const envyMatrix: Record<string, Record<string, string>> = {};
  let warning: string | null = null;

  for (const agent of economy.agents) {
    const room = response.allocation.assignment[agent.id];
    const rent = rents[room];
    const values = Object.fromEntries(
      Object.entries(agent.values).map(([r, v]) => [r, Rational.parse(v)]),
    );
    const budget = Rational.parse(agent.budget);
    const rho = Rational.parse(agent.rho);
    const own = kinkedUtility(values, budget, rho, room, rent);
    const overage = rent.sub(budget);
    rows.push({
      agent: agent.id,
      room,
      rent: rent.toString(),
      rentDisplay: rent.toDisplay(),
      utility: own.toString(),
      overBudgetBy: overage.gt(ZERO) ? overage.toString() : null,
    });
    envyMatrix[agent.id] = {};
    for (const other of economy.agents) {
      const otherRoom = response.allocation.assignment[other.id];
      const theirs = kinkedUtility(values, budget, rho, otherRoom, rents[otherRoom]);
      const gap = theirs.sub(own);
      envyMatrix[agent.id][other.id] = gap.toString();
      if (other.id !== agent.id && gap.gt(ZERO)) {
        warning = `certified response leaves ${agent.id} envying ${other.id} by ${gap.toString()}`;
      }
    }
  }

  const ok = response.certificate.ok ?? response.certificate.is_maxmin ?? false;
  return {
    rows,
    envyMatrix,
    certificateOk: ok,
    certificateKind: response.certificate.kind ?? 'maxmin-utility',
    integrityWarning: warning,
    objectiveValue: response.objective_value,
  };
}
