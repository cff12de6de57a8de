/** Service payload shapes. These mirror the JSON bodies byte for byte:
 * the client never recomputes a model output, it only formats them. */

export interface HeroInfo {
  id: number;
  name: string;
  role: string;
}

export interface Actor {
  side: number;
  team: number;
  action: 'ban' | 'pick';
}

export interface CommittedStep {
  type: 'step' | 'round';
  side?: number;
  action?: 'ban' | 'pick';
  hero?: number;
  winner_side?: number;
  winner_team?: number;
}

export interface SessionSummary {
  session_id: string;
  template: string;
  template_steps: string;
  hero_count: number;
  our_team: string;
  opp_team: string;
  n_rounds: number;
  round_index: number;
  blue_team: number | null;
  policy: string;
  wins: { ours: number; theirs: number };
  series_over: boolean;
  cursor: number;
  round_complete: boolean;
  bans: number[];
  picks: { blue: number[]; red: number[] };
  barred: { ours: number[]; theirs: number[] };
  actor: Actor | null;
  committed: CommittedStep[];
}

export interface Alternative {
  hero: number;
  score: number;
}

export interface PathStep {
  index: number;
  side: number;
  team: number;
  action: 'ban' | 'pick';
  kind: 'recommended' | 'predicted' | 'custom';
  hero: number;
  alternatives: Alternative[];
}

export interface PathResult {
  steps: PathStep[];
  warning: string | null;
}

export interface RecommendResult {
  chosen: number;
  ranked: { hero: number; score: number; visits: number }[];
  iterations_run: number;
}

export interface PredictResult {
  top: { hero: number; probability: number }[];
}

export interface CompareRow {
  round_win_prob: number;
  expected_total_wins: number;
  future_expected_wins: number;
  flagged: boolean;
}

export interface Meta {
  seed: number;
  config: Record<string, unknown>;
}

export interface Enveloped<T> {
  result: T;
  meta: Meta;
}

export interface HeroStatsRow {
  hero: number;
  picks: number;
  bans: number;
  wins: number;
  matches_total: number;
  picked_rate: number;
  banned_rate: number;
  win_rate: number | null;
  avg_kills: number | null;
  avg_deaths: number | null;
  avg_assists: number | null;
}

export interface PlayerPoint {
  value: number;
  hero: number;
  match_id: string;
  highlighted: boolean;
}

export interface PlayerDistribution {
  player: string;
  metric: string;
  minimum: number;
  q1: number;
  median: number;
  q3: number;
  maximum: number;
  whisker_low: number;
  whisker_high: number;
  outliers: number[];
  points: PlayerPoint[];
}

export interface TeamRadar {
  team: string;
  hero_subset: number[];
  sample: number;
  win_rate: number | null;
  team_kda: number | null;
  avg_tyrants: number | null;
  avg_dragons: number | null;
  avg_towers: number | null;
  avg_duration: number | null;
}

export interface RelationEntry {
  hero: number;
  other: number;
  relation: 'synergy' | 'counters' | 'countered_by';
  joint_games: number;
  rate: number;
}

export interface PatchWindow {
  matches_total: number;
  picks: number;
  bans: number;
  wins: number;
  win_rate: number | null;
  picked_rate: number;
  banned_rate: number;
  avg_kills: number | null;
  avg_deaths: number | null;
  avg_assists: number | null;
}

export interface PatchDiff {
  hero: number;
  patch_date: string;
  before: PatchWindow;
  after: PatchWindow;
  team: string | null;
  team_before: PatchWindow | null;
  team_after: PatchWindow | null;
}

export interface ApiErrorBody {
  error: { code: string; rule: string | null; message: string };
}
