/** Typed client for the drafting service. One method per endpoint; the
 * fetch implementation is injectable so tests can replay recorded
 * sessions and assert the exact call sequence. */

import type {
  ApiErrorBody,
  CompareRow,
  Enveloped,
  HeroInfo,
  HeroStatsRow,
  PatchDiff,
  PathResult,
  PlayerDistribution,
  PredictResult,
  RecommendResult,
  RelationEntry,
  SessionSummary,
  TeamRadar,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    public rule: string | null,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private base: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: 'GET' | 'POST', path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'Content-Type': 'application/json' } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const resp = await this.fetchImpl(this.base + path, init);
    const payload = await resp.json();
    if (!resp.ok) {
      const err = (payload as ApiErrorBody).error ?? {
        code: 'unknown',
        rule: null,
        message: 'unexpected service error',
      };
      throw new ServiceError(resp.status, err.code, err.rule, err.message);
    }
    return payload as T;
  }

  health(): Promise<{ status: string; backend: string }> {
    return this.request('GET', '/health');
  }

  heroes(): Promise<{ heroes: HeroInfo[] }> {
    return this.request('GET', '/heroes');
  }

  createSession(body: {
    template: string;
    n_rounds: number;
    policy?: string;
    our_team?: string;
    opp_team?: string;
    first_blue?: 'ours' | 'theirs';
  }): Promise<SessionSummary> {
    return this.request('POST', '/session', body);
  }

  getSession(sid: string): Promise<SessionSummary> {
    return this.request('GET', `/session/${sid}`);
  }

  commitStep(sid: string, hero: number): Promise<SessionSummary> {
    return this.request('POST', `/session/${sid}/step`, { hero });
  }

  undoStep(sid: string): Promise<SessionSummary> {
    return this.request('POST', `/session/${sid}/undo`, {});
  }

  advanceRound(sid: string, winnerSide: number): Promise<SessionSummary> {
    return this.request('POST', `/session/${sid}/round`, { winner_side: winnerSide });
  }

  legal(sid: string): Promise<{ legal: number[] }> {
    return this.request('GET', `/session/${sid}/legal`);
  }

  recommend(body: {
    session_id: string;
    iterations?: number;
    seed?: number;
  }): Promise<Enveloped<RecommendResult>> {
    return this.request('POST', '/recommend', body);
  }

  predict(body: { session_id: string; k?: number }): Promise<Enveloped<PredictResult>> {
    return this.request('POST', '/predict', body);
  }

  path(body: {
    session_id: string;
    depth: number;
    overrides?: Record<string, number>;
    iterations?: number;
    seed?: number;
  }): Promise<Enveloped<PathResult>> {
    return this.request('POST', '/path', body);
  }

  compare(body: {
    session_id: string;
    drafts: number[][];
    samples?: number;
    seed?: number;
  }): Promise<Enveloped<{ rows: CompareRow[] }>> {
    return this.request('POST', '/compare', body);
  }

  heroStats(params: {
    hero?: number;
    team?: string;
    patch?: string;
    date_from?: string;
    date_to?: string;
  }): Promise<{ stats: HeroStatsRow[] }> {
    return this.request('GET', `/stats/hero${toQuery(params)}`);
  }

  playerStats(params: {
    player: string;
    metric: string;
    highlight_hero?: number;
  }): Promise<{ distribution: PlayerDistribution }> {
    return this.request('GET', `/stats/player${toQuery(params)}`);
  }

  teamRadar(params: { team: string; heroes?: string }): Promise<{ radar: TeamRadar }> {
    return this.request('GET', `/stats/team${toQuery(params)}`);
  }

  relations(params: {
    hero: number;
    relation: string;
    min_support?: number;
  }): Promise<{ relations: RelationEntry[] }> {
    return this.request('GET', `/relations${toQuery(params)}`);
  }

  patchDiff(params: { date: string; hero: number; team?: string }): Promise<{ diff: PatchDiff }> {
    return this.request('GET', `/patch-diff${toQuery(params)}`);
  }
}

function toQuery(params: Record<string, unknown>): string {
  const parts = Object.entries(params)
    .filter(([, v]) => v !== undefined && v !== null && v !== '')
    .map(([k, v]) => `${encodeURIComponent(k)}=${encodeURIComponent(String(v))}`);
  return parts.length ? `?${parts.join('&')}` : '';
}
