/** Pure render functions: fetched service state in, HTML out.
 *
 * Every model-produced number is attached verbatim on a `data-value`
 * attribute (display text may be rounded for reading); nothing here
 * recomputes scores, probabilities, or rates. Keeping these functions pure
 * makes the whole UI snapshot-testable without a DOM.
 */

import type {
  CompareRow,
  HeroInfo,
  HeroStatsRow,
  PatchDiff,
  PathResult,
  PathStep,
  PlayerDistribution,
  RelationEntry,
  SessionSummary,
  TeamRadar,
} from './types.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export type HeroIndex = Map<number, HeroInfo>;

export function heroIndex(heroes: HeroInfo[]): HeroIndex {
  return new Map(heroes.map((h) => [h.id, h]));
}

function heroName(index: HeroIndex, id: number): string {
  return index.get(id)?.name ?? `#${id}`;
}

function heroRole(index: HeroIndex, id: number): string {
  return index.get(id)?.role ?? 'unknown';
}

/** Compact id/name badge with a role color class (no game art ships). */
export function heroBadge(index: HeroIndex, id: number, cls = ''): string {
  const role = heroRole(index, id);
  return (
    `<span class="hero-badge role-${escapeHtml(role)} ${cls}" data-hero="${id}">` +
    `${escapeHtml(heroName(index, id))}</span>`
  );
}

function pct(x: number): string {
  return `${(100 * x).toFixed(1)}%`;
}

function num(x: number, digits = 3): string {
  return x.toFixed(digits);
}

// ---------------------------------------------------------------------------
// BP panel
// ---------------------------------------------------------------------------

export function renderBpPanel(summary: SessionSummary, index: HeroIndex): string {
  const tokens = summary.template_steps.split('-');
  const committedSteps = summary.committed.filter((c) => c.type === 'step');
  const slots = tokens.map((token, i) => {
    const kind = token[0] === 'b' ? 'ban' : 'pick';
    const side = token[1];
    const done = i < summary.cursor ? committedSteps[i] : undefined;
    const active = i === summary.cursor ? ' active' : '';
    const body =
      done && done.hero !== undefined
        ? heroBadge(index, done.hero, kind === 'ban' ? 'banned' : `picked-${side}`)
        : `<span class="slot-empty">${kind === 'ban' ? '&#8856;' : '&middot;'}</span>`;
    return (
      `<div class="bp-slot side-${side} ${kind}${active}" data-step="${i}">` +
      `<span class="slot-label">${escapeHtml(token)}</span>${body}</div>`
    );
  });
  const actor = summary.actor
    ? `${summary.actor.team === 1 ? summary.our_team : summary.opp_team} to ` +
      `${summary.actor.action} (side ${summary.actor.side})`
    : summary.series_over
      ? 'series over'
      : 'round complete';
  return (
    `<div class="bp-panel" data-session="${escapeHtml(summary.session_id)}">` +
    `<div class="bp-head">` +
    `<span class="team ours">${escapeHtml(summary.our_team)}</span>` +
    `<span class="score" data-value="${summary.wins.ours}:${summary.wins.theirs}">` +
    `${summary.wins.ours} : ${summary.wins.theirs}</span>` +
    `<span class="team theirs">${escapeHtml(summary.opp_team)}</span>` +
    `<span class="round">round ${summary.round_index + 1} of ${summary.n_rounds}</span>` +
    `<span class="turn">${escapeHtml(actor)}</span>` +
    `</div>` +
    `<div class="bp-slots">${slots.join('')}</div>` +
    `<div class="bp-barred">barred for ${escapeHtml(summary.our_team)}: ` +
    summary.barred.ours.map((h) => heroBadge(index, h, 'mini')).join('') +
    ` / ${escapeHtml(summary.opp_team)}: ` +
    summary.barred.theirs.map((h) => heroBadge(index, h, 'mini')).join('') +
    `</div></div>`
  );
}

// ---------------------------------------------------------------------------
// Sequence path view
// ---------------------------------------------------------------------------

function renderAlternatives(step: PathStep, index: HeroIndex): string {
  const maxScore = Math.max(...step.alternatives.map((a) => a.score), 1e-12);
  const rows = step.alternatives
    .map((alt) => {
      const width = Math.max(4, Math.round((100 * alt.score) / maxScore));
      const label = step.kind === 'predicted' ? pct(alt.score) : num(alt.score);
      return (
        `<div class="alt ${step.kind}" data-pos="${step.index}" data-hero="${alt.hero}" ` +
        `data-value="${alt.score}">` +
        `<span class="alt-bar" style="width:${width}%"></span>` +
        `<span class="alt-name">${escapeHtml(heroName(index, alt.hero))}</span>` +
        `<span class="alt-score">${label}</span></div>`
      );
    })
    .join('');
  return `<div class="alts">${rows}</div>`;
}

export function renderPathTree(path: PathResult, index: HeroIndex): string {
  const nodes = path.steps
    .map((step) => {
      return (
        `<div class="path-node kind-${step.kind} action-${step.action} side-${step.side}" ` +
        `data-pos="${step.index}" data-hero="${step.hero}">` +
        `<div class="node-main">` +
        `<span class="node-action">${step.action}${step.side}</span>` +
        heroBadge(index, step.hero, step.kind) +
        `<span class="node-kind">${step.kind}</span>` +
        `</div>` +
        renderAlternatives(step, index) +
        `</div>`
      );
    })
    .join('<div class="path-link"></div>');
  const warning = path.warning
    ? `<div class="path-warning">${escapeHtml(path.warning)}</div>`
    : '';
  return `<div class="path-tree">${warning}<div class="path-row">${nodes}</div></div>`;
}

// ---------------------------------------------------------------------------
// Drafting comparison view
// ---------------------------------------------------------------------------

export function renderComparison(
  pinned: { plan: number[]; row: CompareRow }[],
  index: HeroIndex,
  nRounds: number,
): string {
  const items = pinned
    .map(({ plan, row }, i) => {
      const widthRound = Math.round(100 * row.round_win_prob);
      const widthTotal = Math.round((100 * row.expected_total_wins) / nRounds);
      const flag = row.flagged ? ' below-half' : '';
      return (
        `<div class="compare-row${flag}" data-index="${i}">` +
        `<div class="compare-notes">${plan.map((h) => heroBadge(index, h, 'mini')).join('')}</div>` +
        `<div class="compare-bars">` +
        `<div class="bar round${flag}" data-value="${row.round_win_prob}">` +
        `<span class="bar-fill" style="width:${widthRound}%"></span>` +
        `<span class="bar-mark"></span>` +
        `<span class="bar-label">round ${pct(row.round_win_prob)}</span></div>` +
        `<div class="bar total" data-value="${row.expected_total_wins}">` +
        `<span class="bar-fill" style="width:${widthTotal}%"></span>` +
        `<span class="bar-label">expected wins ${num(row.expected_total_wins)}</span></div>` +
        `</div></div>`
      );
    })
    .join('');
  return `<div class="comparison">${items || '<div class="empty">no pinned drafts</div>'}</div>`;
}

// ---------------------------------------------------------------------------
// Player box plots (SVG)
// ---------------------------------------------------------------------------

export function renderBoxPlot(dist: PlayerDistribution, width = 320, height = 90): string {
  const lo = Math.min(dist.minimum, dist.whisker_low);
  const hi = Math.max(dist.maximum, dist.whisker_high);
  const span = hi - lo || 1;
  const x = (v: number) => 12 + ((v - lo) / span) * (width - 24);
  const mid = height / 2;
  const boxTop = mid - 16;
  const boxBottom = mid + 16;
  const dots = dist.points
    .map((p) => {
      const cls = p.highlighted ? 'point highlighted' : 'point';
      return (
        `<circle class="${cls}" cx="${x(p.value).toFixed(1)}" cy="${mid + 26}" r="3" ` +
        `data-hero="${p.hero}" data-value="${p.value}"><title>` +
        `${escapeHtml(p.match_id)}: ${num(p.value)}</title></circle>`
      );
    })
    .join('');
  const outliers = dist.outliers
    .map((v) => `<circle class="outlier" cx="${x(v).toFixed(1)}" cy="${mid}" r="3" data-value="${v}"/>`)
    .join('');
  return (
    `<svg class="boxplot" width="${width}" height="${height}" ` +
    `data-player="${escapeHtml(dist.player)}" data-metric="${escapeHtml(dist.metric)}">` +
    `<line class="whisker" x1="${x(dist.whisker_low).toFixed(1)}" x2="${x(dist.whisker_high).toFixed(1)}" y1="${mid}" y2="${mid}"/>` +
    `<rect class="box" x="${x(dist.q1).toFixed(1)}" y="${boxTop}" ` +
    `width="${(x(dist.q3) - x(dist.q1)).toFixed(1)}" height="${boxBottom - boxTop}" ` +
    `data-q1="${dist.q1}" data-q3="${dist.q3}"/>` +
    `<line class="median" x1="${x(dist.median).toFixed(1)}" x2="${x(dist.median).toFixed(1)}" ` +
    `y1="${boxTop}" y2="${boxBottom}" data-value="${dist.median}"/>` +
    outliers +
    dots +
    `</svg>`
  );
}

// ---------------------------------------------------------------------------
// Hero glyph (SVG): three relation sectors plus a basic-information sector
// ---------------------------------------------------------------------------

function polar(cx: number, cy: number, r: number, deg: number): [number, number] {
  const rad = ((deg - 90) * Math.PI) / 180;
  return [cx + r * Math.cos(rad), cy + r * Math.sin(rad)];
}

function arcPath(cx: number, cy: number, r: number, a0: number, a1: number): string {
  const [x0, y0] = polar(cx, cy, r, a0);
  const [x1, y1] = polar(cx, cy, r, a1);
  const large = a1 - a0 > 180 ? 1 : 0;
  return `M ${x0.toFixed(1)} ${y0.toFixed(1)} A ${r} ${r} 0 ${large} 1 ${x1.toFixed(1)} ${y1.toFixed(1)}`;
}

function sector(
  entries: RelationEntry[],
  index: HeroIndex,
  cls: string,
  startDeg: number,
  cx: number,
  cy: number,
): string {
  return entries
    .slice(0, 3)
    .map((e, i) => {
      const a0 = startDeg + i * 28;
      const r = 46 + 22 * e.rate;
      const [lx, ly] = polar(cx, cy, r + 10, a0 + 11);
      return (
        `<g class="relation ${cls}" data-other="${e.other}" data-value="${e.rate}">` +
        `<path d="${arcPath(cx, cy, r, a0, a0 + 22)}"/>` +
        `<text x="${lx.toFixed(1)}" y="${ly.toFixed(1)}">` +
        `${escapeHtml(heroName(index, e.other))} ${pct(e.rate)}</text></g>`
      );
    })
    .join('');
}

export function renderHeroGlyph(
  hero: number,
  stats: HeroStatsRow | undefined,
  relations: { countered_by: RelationEntry[]; counters: RelationEntry[]; synergy: RelationEntry[] },
  index: HeroIndex,
  size = 240,
): string {
  const c = size / 2;
  const info: string[] = [];
  if (stats) {
    const k = stats.avg_kills ?? 0;
    const d = stats.avg_deaths ?? 0;
    const a = stats.avg_assists ?? 0;
    const total = k + d + a || 1;
    // Innermost ring: kills/deaths/assists shares; outer rings: rates.
    let angle = 95;
    for (const [cls, share, value] of [
      ['kda-kills', k / total, k],
      ['kda-deaths', d / total, d],
      ['kda-assists', a / total, a],
    ] as const) {
      const sweep = 160 * share;
      info.push(
        `<path class="${cls}" data-value="${value}" d="${arcPath(c, c, 34, angle, angle + sweep)}"/>`,
      );
      angle += sweep;
    }
    const rings: [string, number][] = [
      ['ring-picked', stats.picked_rate],
      ['ring-banned', stats.banned_rate],
      ['ring-win', stats.win_rate ?? 0],
    ];
    rings.forEach(([cls, rate], i) => {
      info.push(
        `<path class="${cls}" data-value="${rate}" ` +
        `d="${arcPath(c, c, 42 + 6 * (i + 1), 95, 95 + 160 * Math.min(rate, 1))}"/>`,
      );
    });
  }
  return (
    `<svg class="hero-glyph" width="${size}" height="${size}" data-hero="${hero}">` +
    `<circle class="avatar" cx="${c}" cy="${c}" r="30"/>` +
    `<text class="glyph-name" x="${c}" y="${c + 4}">${escapeHtml(heroName(index, hero))}</text>` +
    sector(relations.countered_by, index, 'countered-by', -85, c, c) +
    sector(relations.counters, index, 'counters', 5, c, c) +
    sector(relations.synergy, index, 'synergy', 185, c, c) +
    info.join('') +
    `</svg>`
  );
}

// ---------------------------------------------------------------------------
// Team radar (SVG, six axes)
// ---------------------------------------------------------------------------

const RADAR_AXES: [keyof TeamRadar, string][] = [
  ['win_rate', 'win rate'],
  ['team_kda', 'team KDA'],
  ['avg_tyrants', 'tyrants'],
  ['avg_dragons', 'dragons'],
  ['avg_towers', 'towers'],
  ['avg_duration', 'duration'],
];

export function renderRadar(radars: TeamRadar[], size = 260): string {
  const c = size / 2;
  const rMax = c - 34;
  // Axes normalize against the max observed value across the compared teams.
  const maxima = RADAR_AXES.map(([key]) =>
    Math.max(...radars.map((r) => Number(r[key] ?? 0)), 1e-9),
  );
  const axes = RADAR_AXES.map(([, label], i) => {
    const [x, y] = polar(c, c, rMax, (360 / 6) * i);
    const [lx, ly] = polar(c, c, rMax + 16, (360 / 6) * i);
    return (
      `<line class="axis" x1="${c}" y1="${c}" x2="${x.toFixed(1)}" y2="${y.toFixed(1)}"/>` +
      `<text class="axis-label" x="${lx.toFixed(1)}" y="${ly.toFixed(1)}">${label}</text>`
    );
  }).join('');
  const polys = radars
    .map((radar, t) => {
      const pts = RADAR_AXES.map(([key], i) => {
        const value = Number(radar[key] ?? 0);
        const [x, y] = polar(c, c, (rMax * value) / maxima[i], (360 / 6) * i);
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      }).join(' ');
      const values = RADAR_AXES.map(([key]) => `${String(key)}:${radar[key]}`).join(';');
      return (
        `<polygon class="radar-team team-${t}" points="${pts}" ` +
        `data-team="${escapeHtml(radar.team)}" data-sample="${radar.sample}" ` +
        `data-values="${escapeHtml(values)}"/>`
      );
    })
    .join('');
  return `<svg class="team-radar" width="${size}" height="${size}">${axes}${polys}</svg>`;
}

// ---------------------------------------------------------------------------
// Patch before/after bar chart
// ---------------------------------------------------------------------------

const PATCH_METRICS: [keyof PatchDiff['before'] & string, string][] = [
  ['win_rate', 'win rate'],
  ['picked_rate', 'picked rate'],
  ['banned_rate', 'banned rate'],
  ['avg_kills', 'avg kills'],
  ['avg_deaths', 'avg deaths'],
  ['avg_assists', 'avg assists'],
];

export function renderPatchChart(diff: PatchDiff, index: HeroIndex): string {
  const groups = PATCH_METRICS.map(([key, label]) => {
    const before = diff.before[key];
    const after = diff.after[key];
    const scale = Math.max(Number(before ?? 0), Number(after ?? 0), 1e-9);
    const bar = (cls: string, value: number | null, overlay = false) => {
      if (value === null) return `<div class="patch-bar ${cls} missing"></div>`;
      const h = Math.max(2, Math.round((56 * Number(value)) / scale));
      return (
        `<div class="patch-bar ${cls}${overlay ? ' overlay' : ''}" data-value="${value}" ` +
        `style="height:${h}px" title="${num(Number(value))}"></div>`
      );
    };
    const overlays =
      diff.team !== null
        ? bar('before', diff.team_before ? diff.team_before[key] : null, true) +
          bar('after', diff.team_after ? diff.team_after[key] : null, true)
        : '';
    return (
      `<div class="patch-group" data-metric="${key}">` +
      `<div class="patch-bars">${bar('before', before)}${bar('after', after)}${overlays}</div>` +
      `<div class="patch-label">${label}</div></div>`
    );
  }).join('');
  return (
    `<div class="patch-chart" data-hero="${diff.hero}" data-date="${escapeHtml(diff.patch_date)}">` +
    `<div class="patch-title">${escapeHtml(heroName(index, diff.hero))} before/after ` +
    `${escapeHtml(diff.patch_date)}${diff.team ? ` (overlay: ${escapeHtml(diff.team)})` : ''}</div>` +
    `<div class="patch-groups">${groups}</div></div>`
  );
}

// ---------------------------------------------------------------------------
// Hero selector: role filter, alphabetical order
// ---------------------------------------------------------------------------

export function renderHeroSelector(
  heroes: HeroInfo[],
  options: { role?: string; disabled?: Set<number> } = {},
): string {
  const roles = [...new Set(heroes.map((h) => h.role))].sort();
  const tabs = ['all', ...roles]
    .map(
      (r) =>
        `<button class="role-tab${(options.role ?? 'all') === r ? ' active' : ''}" ` +
        `data-role="${escapeHtml(r)}">${escapeHtml(r)}</button>`,
    )
    .join('');
  const visible = heroes
    .filter((h) => !options.role || options.role === 'all' || h.role === options.role)
    .sort((a, b) => a.name.localeCompare(b.name));
  const cells = visible
    .map((h) => {
      const off = options.disabled?.has(h.id) ? ' disabled' : '';
      return (
        `<button class="selector-hero role-${escapeHtml(h.role)}${off}" data-hero="${h.id}"` +
        `${off ? ' disabled' : ''}>${escapeHtml(h.name)}</button>`
      );
    })
    .join('');
  return `<div class="hero-selector"><div class="role-tabs">${tabs}</div><div class="selector-grid">${cells}</div></div>`;
}
