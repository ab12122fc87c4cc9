/**
 * Browser entry: a single-page wizard over the HTTP API. All authoritative
 * logic is server-side; this file only renders `SessionView` snapshots and
 * forwards raw inputs.
 */

import { RentDivClient } from './api.js';
import { AllocationView, renderAllocation } from './views.js';
import { SessionView, Wizard } from './wizard.js';

const root = document.getElementById('app');
if (!root) throw new Error('missing #app container');

const client = new RentDivClient('');
const wizard = new Wizard(client);

function h(tag: string, attrs: Record<string, string> = {}, ...children: (Node | string)[]) {
  const el = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  el.append(...children);
  return el;
}

function render(view: SessionView) {
  root!.replaceChildren();
  if (view.phase === 'configuring') {
    root!.append(renderConfigForm());
    return;
  }
  root!.append(renderProgress(view));
  if (view.serverError) root!.append(h('p', { class: 'error' }, view.serverError));
  if (view.validationError) root!.append(h('p', { class: 'error' }, view.validationError));
  if (view.phase === 'asking' && view.question) {
    root!.append(renderQuestion(view));
  } else if (view.phase === 'ready-to-solve') {
    const button = h('button', {}, 'Compute the fair split') as HTMLButtonElement;
    button.onclick = () => void wizard.solve().then(render);
    root!.append(h('p', {}, 'Everyone has answered.'), button);
  } else if (view.phase === 'solved' && view.result) {
    root!.append(renderResult(renderAllocation(view.result)));
  }
}

function renderConfigForm(): HTMLElement {
  const form = h('form', { class: 'config' }) as HTMLFormElement;
  const agents = h('input', { value: 'alice,bob', name: 'agents' }) as HTMLInputElement;
  const rooms = h('input', { value: 'a,b', name: 'rooms' }) as HTMLInputElement;
  const total = h('input', { value: '800', name: 'total' }) as HTMLInputElement;
  const menu = h('input', { value: '0,1/2,1,2', name: 'menu' }) as HTMLInputElement;
  const rhoBar = h('input', { value: '110', name: 'rho_bar' }) as HTMLInputElement;
  form.append(
    h('label', {}, 'Roommates (comma separated): ', agents),
    h('label', {}, 'Rooms: ', rooms),
    h('label', {}, 'Total rent: ', total),
    h('label', {}, 'Budget sensitivity menu: ', menu),
    h('label', {}, 'Sensitivity cap: ', rhoBar),
    h('button', { type: 'submit' }, 'Start'),
  );
  form.onsubmit = (event) => {
    event.preventDefault();
    void wizard
      .start({
        agents: agents.value.split(',').map((s) => s.trim()),
        rooms: rooms.value.split(',').map((s) => s.trim()),
        total_rent: total.value.trim(),
        rho_menu: menu.value.split(',').map((s) => s.trim()),
        rho_bar: rhoBar.value.trim(),
      })
      .then(render);
  };
  return form;
}

function renderProgress(view: SessionView): HTMLElement {
  const list = h('ul', { class: 'progress' });
  for (const [agent, state] of Object.entries(view.progress)) {
    list.append(h('li', { class: state }, `${agent}: ${state}`));
  }
  return list;
}

function renderQuestion(view: SessionView): HTMLElement {
  const question = view.question!;
  const form = h('form', { class: 'question' }) as HTMLFormElement;
  form.append(h('h2', {}, `Question for ${question.agent}`), h('p', {}, question.prompt));
  const inputs: Record<string, HTMLInputElement | HTMLSelectElement> = {};
  if (question.kind === 'rents') {
    for (const room of question.fields.rooms ?? []) {
      const input = h('input', { name: room }) as HTMLInputElement;
      inputs[room] = input;
      form.append(h('label', {}, `Rent for ${room}: `, input));
    }
    form.append(h('p', {}, `The rents must add up to ${question.fields.sum}.`));
  } else if (question.kind === 'budget') {
    const input = h('input', { name: 'budget' }) as HTMLInputElement;
    inputs.budget = input;
    form.append(h('label', {}, 'Budget: ', input));
  } else if (question.kind === 'rho_equivalent') {
    const select = h('select', { name: 'equivalent' }) as HTMLSelectElement;
    for (const option of question.fields.options ?? []) {
      select.append(h('option', { value: option }, option));
    }
    inputs.equivalent = select;
    form.append(h('label', {}, 'Equivalent rebate: ', select));
  } else {
    const select = h('select', { name: 'assessment' }) as HTMLSelectElement;
    for (const option of question.fields.options ?? []) {
      select.append(h('option', { value: option }, option));
    }
    inputs.assessment = select;
    form.append(h('label', {}, 'Your answer: ', select));
  }
  form.append(h('button', { type: 'submit' }, 'Submit'));
  form.onsubmit = (event) => {
    event.preventDefault();
    const raw: Record<string, string> = {};
    for (const [name, input] of Object.entries(inputs)) raw[name] = input.value;
    void wizard.submit(raw).then(render);
  };
  return form;
}

function renderResult(view: AllocationView): HTMLElement {
  const container = h('div', { class: 'result' });
  container.append(
    h(
      'p',
      { class: view.certificateOk ? 'certified' : 'error' },
      view.certificateOk
        ? `Certified ${view.certificateKind} selection (value ${view.objectiveValue}).`
        : 'The server returned an uncertified allocation.',
    ),
  );
  if (view.integrityWarning) {
    container.append(h('p', { class: 'error integrity' }, `Integrity warning: ${view.integrityWarning}`));
  }
  const table = h('table', { class: 'rows' });
  table.append(
    h('tr', {}, h('th', {}, 'Roommate'), h('th', {}, 'Room'), h('th', {}, 'Rent'), h('th', {}, 'Utility'), h('th', {}, '')),
  );
  for (const row of view.rows) {
    table.append(
      h(
        'tr',
        {},
        h('td', {}, row.agent),
        h('td', {}, row.room),
        h('td', {}, row.rentDisplay),
        h('td', {}, row.utility),
        h('td', {}, row.overBudgetBy ? h('span', { class: 'badge' }, `above budget by ${row.overBudgetBy}`) : ''),
      ),
    );
  }
  container.append(table);
  const matrix = h('table', { class: 'envy' });
  const agents = view.rows.map((r) => r.agent);
  matrix.append(h('tr', {}, h('th', {}, 'envy gap'), ...agents.map((a) => h('th', {}, a))));
  for (const i of agents) {
    matrix.append(
      h('tr', {}, h('th', {}, i), ...agents.map((j) => h('td', {}, view.envyMatrix[i][j]))),
    );
  }
  container.append(h('h3', {}, 'Envy matrix (all entries should be at most 0)'), matrix);
  return container;
}

render(wizard.snapshot());
