/**
 * End-to-end: spawn the real service and run the reference elicitation
 * script through the wizard. The first roommate reports indifference rents
 * 500/300 against a budget of 400, which lands her in the probe-rebate
 * case; her answer pins the budget violation index at 1 and the recovered
 * values are 600/300. Replaying the recorded answer script must reproduce
 * the identical economy document and allocation.
 */

import { ChildProcess, spawn } from 'node:child_process';
import { createServer } from 'node:net';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { RentDivClient } from '../src/api.js';
import { Rational } from '../src/rational.js';
import { renderAllocation } from '../src/views.js';
import { Wizard, replayScript } from '../src/wizard.js';

const config = {
  agents: ['alice', 'bob'],
  rooms: ['a', 'b'],
  total_rent: '800',
  rho_menu: ['0', '1'],
  rho_bar: '110',
};

let server: ChildProcess | null = null;
let base = '';

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once('error', reject);
    probe.listen(0, '127.0.0.1', () => {
      const address = probe.address();
      if (address === null || typeof address === 'string') {
        reject(new Error('no port'));
        return;
      }
      const { port } = address;
      probe.close(() => resolve(port));
    });
  });
}

async function waitForServer(url: string, timeoutMs = 45000): Promise<void> {
  const start = Date.now();
  while (Date.now() - start < timeoutMs) {
    try {
      const response = await fetch(`${url}/v1/sessions/warmup/question`);
      if (response.status === 404) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 300));
  }
  throw new Error('service did not come up');
}

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  server = spawn('python3', ['-m', 'rentdiv.cli', 'serve', '--port', String(port)], {
    cwd: new URL('../..', import.meta.url).pathname,
    stdio: 'ignore',
  });
  await waitForServer(base);
}, 60000);

afterAll(() => {
  server?.kill();
});

describe('live elicitation round trip', () => {
  it('runs the probe-rebate script to a certified badge-bearing result', async () => {
    const wizard = new Wizard(new RentDivClient(base));
    let view = await wizard.start(config);
    expect(view.question).toMatchObject({ agent: 'alice', kind: 'rents' });

    view = await wizard.submit({ a: '500', b: '300' });
    expect(view.question).toMatchObject({ agent: 'alice', kind: 'budget' });
    view = await wizard.submit({ budget: '400' });
    expect(view.question).toMatchObject({ agent: 'alice', kind: 'rho_equivalent' });
    expect(view.question?.fields.probe).toBe('101');
    expect(view.question?.fields.options).toContain('201');

    // an answer outside the offered options is rejected client-side
    const rejected = await wizard.submit({ equivalent: '150' });
    expect(rejected.validationError).not.toBeNull();
    expect(rejected.question?.kind).toBe('rho_equivalent');

    view = await wizard.submit({ equivalent: '201' });
    expect(view.question).toMatchObject({ agent: 'bob', kind: 'rents' });
    view = await wizard.submit({ a: '450', b: '350' });
    view = await wizard.submit({ budget: '800' });
    expect(view.phase).toBe('ready-to-solve');

    view = await wizard.solve();
    const result = view.result!;
    const economy = result.economy!;
    expect(economy.rooms).toEqual(['a', 'b']);
    expect(economy.total_rent).toBe('800');
    const alice = economy.agents.find((a) => a.id === 'alice')!;
    expect(alice.values).toEqual({ a: '600', b: '300' });
    expect(alice.rho).toBe('1');
    expect(alice.budget).toBe('400');

    const rendered = renderAllocation(result);
    expect(rendered.certificateOk).toBe(true);
    expect(rendered.integrityWarning).toBeNull();
    const aliceRow = rendered.rows.find((r) => r.agent === 'alice')!;
    expect(aliceRow.overBudgetBy).not.toBeNull();
    const overage = Rational.parse(aliceRow.rent).sub(Rational.parse('400'));
    expect(Rational.parse(aliceRow.overBudgetBy!).eq(overage)).toBe(true);
    for (const i of config.agents) {
      expect(rendered.envyMatrix[i][i]).toBe('0');
      for (const j of config.agents) {
        expect(Rational.parse(rendered.envyMatrix[i][j]).gt(Rational.parse('0'))).toBe(false);
      }
    }

    // replaying the recorded script is deterministic, bit for bit
    const client = new RentDivClient(base);
    const first = await replayScript(client, config, wizard.script);
    const second = await replayScript(client, config, wizard.script);
    expect(first.economy).toEqual(second.economy);
    expect(first.economy).toEqual(result.economy);
    expect(first.allocation).toEqual(second.allocation);
    expect(first.allocation).toEqual(result.allocation);
  }, 60000);

  it('keeps the server authoritative on rejected answers', async () => {
    const client = new RentDivClient(base);
    const created = await client.createSession(config);
    // bypass client-side validation and submit a bad rent vector directly
    await expect(
      client.answer(created.session_id, 'alice', { rents: { a: '500', b: '200' } }),
    ).rejects.toMatchObject({ code: 'rent_sum_mismatch' });
    const question = await client.getQuestion(created.session_id);
    expect(question.question?.kind).toBe('rents');
  }, 30000);
});
