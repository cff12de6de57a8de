/** Browser entry: wires the controller and render functions to the DOM.
 * All state lives in the controller; this file only routes events and
 * swaps innerHTML. */

import { ApiClient, ServiceError } from './api.js';
import {
  heroIndex,
  renderBoxPlot,
  renderBpPanel,
  renderComparison,
  renderHeroGlyph,
  renderHeroSelector,
  renderPatchChart,
  renderPathTree,
  renderRadar,
} from './render.js';
import { DraftController } from './state.js';
import type { RelationEntry } from './types.js';

const SERVICE_URL =
  new URLSearchParams(window.location.search).get('service') ?? 'http://127.0.0.1:8100';

const api = new ApiClient(SERVICE_URL);
const controller = new DraftController(api, { iterations: 800, seed: 0, samples: 100 });

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function flash(message: string | null): void {
  el('error-bar').textContent = message ?? '';
  el('error-bar').classList.toggle('visible', message !== null);
}

async function guard(action: () => Promise<void>): Promise<void> {
  try {
    flash(null);
    await action();
  } catch (err) {
    if (err instanceof ServiceError) {
      flash(err.rule ? `${err.message} (rule: ${err.rule})` : err.message);
    } else {
      flash(String(err));
    }
  }
  redraw();
}

let selectorRole = 'all';

function redraw(): void {
  const index = heroIndex(controller.heroes);
  if (controller.session) {
    el('bp-view').innerHTML = renderBpPanel(controller.session, index);
    const taken = new Set<number>([
      ...controller.session.bans,
      ...controller.session.picks.blue,
      ...controller.session.picks.red,
      ...controller.session.barred.ours,
    ]);
    el('selector-view').innerHTML = renderHeroSelector(controller.heroes, {
      role: selectorRole,
      disabled: taken,
    });
    el('path-controls').classList.remove('hidden');
  }
  el('path-view').innerHTML = controller.path
    ? renderPathTree(controller.path, index)
    : '<div class="empty">no path requested</div>';
  el('compare-view').innerHTML = renderComparison(
    controller.pinned,
    index,
    controller.session?.n_rounds ?? 1,
  );
  const depthInput = el('path-depth') as HTMLInputElement;
  depthInput.max = String(controller.remaining);
  if (Number(depthInput.value) > controller.remaining) {
    depthInput.value = String(controller.remaining);
  }
}

function wireDraftEvents(): void {
  el('start-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    const form = ev.target as HTMLFormElement;
    const data = new FormData(form);
    void guard(async () => {
      if (!controller.heroes.length) await controller.loadHeroes();
      await controller.start({
        template: String(data.get('template') || 'hok'),
        n_rounds: Number(data.get('n_rounds') || 3),
        our_team: String(data.get('our_team') || 'ours'),
        opp_team: String(data.get('opp_team') || 'theirs'),
        first_blue: (data.get('first_blue') as 'ours' | 'theirs') || 'ours',
      });
    });
  });

  el('selector-view').addEventListener('click', (ev) => {
    const target = ev.target as HTMLElement;
    const tab = target.closest('.role-tab') as HTMLElement | null;
    if (tab) {
      selectorRole = tab.dataset.role ?? 'all';
      redraw();
      return;
    }
    const hero = target.closest('.selector-hero') as HTMLButtonElement | null;
    if (hero && !hero.disabled) {
      void guard(() => controller.commit(Number(hero.dataset.hero)));
    }
  });

  el('undo-button').addEventListener('click', () => void guard(() => controller.undo()));
  el('round-ours').addEventListener('click', () => {
    const side = controller.session?.blue_team === 1 ? 1 : 2;
    void guard(() => controller.advanceRound(side));
  });
  el('round-theirs').addEventListener('click', () => {
    const side = controller.session?.blue_team === 2 ? 1 : 2;
    void guard(() => controller.advanceRound(side));
  });

  el('path-request').addEventListener('click', () => {
    const depth = Number((el('path-depth') as HTMLInputElement).value);
    void guard(() => controller.requestPath(depth));
  });
  el('path-full').addEventListener('click', () => {
    void guard(() => controller.requestPath(controller.remaining));
  });
  el('pin-button').addEventListener('click', () => void guard(() => controller.pinCurrentPath()));

  el('path-view').addEventListener('click', (ev) => {
    const alt = (ev.target as HTMLElement).closest('.alt') as HTMLElement | null;
    if (alt) {
      void guard(() =>
        controller.overrideStep(Number(alt.dataset.pos), Number(alt.dataset.hero)),
      );
    }
  });
}

function wireAnalytics(): void {
  el('player-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    const data = new FormData(ev.target as HTMLFormElement);
    void guard(async () => {
      const params: { player: string; metric: string; highlight_hero?: number } = {
        player: String(data.get('player')),
        metric: String(data.get('metric') || 'kda'),
      };
      const highlight = String(data.get('highlight') || '');
      if (highlight !== '') params.highlight_hero = Number(highlight);
      const out = await api.playerStats(params);
      el('player-view').innerHTML = renderBoxPlot(out.distribution);
    });
  });

  el('glyph-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    const data = new FormData(ev.target as HTMLFormElement);
    const hero = Number(data.get('hero'));
    void guard(async () => {
      const index = heroIndex(controller.heroes);
      const [stats, counteredBy, counters, synergy] = await Promise.all([
        api.heroStats({ hero }),
        api.relations({ hero, relation: 'countered_by' }),
        api.relations({ hero, relation: 'counters' }),
        api.relations({ hero, relation: 'synergy' }),
      ]);
      const rel: Record<string, RelationEntry[]> = {
        countered_by: counteredBy.relations,
        counters: counters.relations,
        synergy: synergy.relations,
      };
      el('glyph-view').innerHTML = renderHeroGlyph(
        hero,
        stats.stats[0],
        rel as never,
        index,
      );
    });
  });

  el('radar-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    const data = new FormData(ev.target as HTMLFormElement);
    void guard(async () => {
      const teams = [String(data.get('team_a')), String(data.get('team_b'))].filter(Boolean);
      const heroes = String(data.get('heroes') || '');
      const radars = await Promise.all(
        teams.map((team) => api.teamRadar(heroes ? { team, heroes } : { team })),
      );
      el('radar-view').innerHTML = renderRadar(radars.map((r) => r.radar));
    });
  });

  el('patch-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    const data = new FormData(ev.target as HTMLFormElement);
    void guard(async () => {
      const index = heroIndex(controller.heroes);
      const params: { date: string; hero: number; team?: string } = {
        date: String(data.get('date')),
        hero: Number(data.get('hero')),
      };
      const team = String(data.get('team') || '');
      if (team) params.team = team;
      const out = await api.patchDiff(params);
      el('patch-view').innerHTML = renderPatchChart(out.diff, index);
    });
  });
}

void guard(async () => {
  await controller.loadHeroes();
  wireDraftEvents();
  wireAnalytics();
});
