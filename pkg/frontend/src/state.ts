/** Session flow controller.
 *
 * Documented API flow (the round-trip test replays exactly this):
 *   1. load the hero registry            GET  /heroes
 *   2. start a session                   POST /session
 *   3. commit each ban/pick              POST /session/{id}/step   (one per click)
 *   4. request a preview path            POST /path {depth}
 *   5. override a path step              POST /path {depth, overrides}  (rebuilds downstream)
 *   6. extend the path to the round end  POST /path {depth: remaining, overrides}
 *   7. pin the full path                 POST /compare {drafts: all pinned plans}
 *
 * Every user action maps to exactly one request. Responses are applied
 * last-write-wins: a response that raced with a newer mutation is
 * discarded (the revision it was issued under no longer matches).
 */

import { ApiClient } from './api.js';
import type {
  CompareRow,
  HeroInfo,
  Meta,
  PathResult,
  SessionSummary,
} from './types.js';

export interface ControllerOptions {
  iterations?: number;
  seed?: number;
  samples?: number;
}

export interface PinnedDraft {
  plan: number[];
  row: CompareRow;
}

export class DraftController {
  heroes: HeroInfo[] = [];
  session: SessionSummary | null = null;
  path: PathResult | null = null;
  pathMeta: Meta | null = null;
  overrides: Record<string, number> = {};
  pathDepth = 0;
  pinnedPlans: number[][] = [];
  pinned: PinnedDraft[] = [];
  lastError: string | null = null;

  private revision = 0;

  constructor(
    private api: ApiClient,
    private options: ControllerOptions = {},
  ) {}

  /** Steps left in the current round (0 when no session). */
  get remaining(): number {
    if (!this.session) return 0;
    return this.session.template_steps.split('-').length - this.session.cursor;
  }

  private bump(): number {
    this.revision += 1;
    return this.revision;
  }

  private fresh(rev: number): boolean {
    return rev === this.revision;
  }

  async loadHeroes(): Promise<void> {
    const rev = this.bump();
    const out = await this.api.heroes();
    if (this.fresh(rev)) this.heroes = out.heroes;
  }

  async start(body: {
    template: string;
    n_rounds: number;
    our_team?: string;
    opp_team?: string;
    policy?: string;
    first_blue?: 'ours' | 'theirs';
  }): Promise<void> {
    const rev = this.bump();
    const summary = await this.api.createSession(body);
    if (!this.fresh(rev)) return;
    this.session = summary;
    this.path = null;
    this.overrides = {};
    this.pinnedPlans = [];
    this.pinned = [];
  }

  private applySummary(rev: number, summary: SessionSummary): void {
    if (!this.fresh(rev)) return;
    this.session = summary;
    // The draft moved: any previewed path or overrides are stale.
    this.path = null;
    this.pathMeta = null;
    this.overrides = {};
  }

  async commit(hero: number): Promise<void> {
    if (!this.session) throw new Error('no session');
    const rev = this.bump();
    this.applySummary(rev, await this.api.commitStep(this.session.session_id, hero));
  }

  async undo(): Promise<void> {
    if (!this.session) throw new Error('no session');
    const rev = this.bump();
    this.applySummary(rev, await this.api.undoStep(this.session.session_id));
  }

  async advanceRound(winnerSide: number): Promise<void> {
    if (!this.session) throw new Error('no session');
    const rev = this.bump();
    this.applySummary(rev, await this.api.advanceRound(this.session.session_id, winnerSide));
  }

  async requestPath(depth: number): Promise<void> {
    if (!this.session) throw new Error('no session');
    const rev = this.bump();
    const body: Parameters<ApiClient['path']>[0] = {
      session_id: this.session.session_id,
      depth,
      iterations: this.options.iterations,
      seed: this.options.seed,
    };
    if (Object.keys(this.overrides).length) body.overrides = this.overrides;
    const out = await this.api.path(body);
    if (!this.fresh(rev)) return;
    this.path = out.result;
    this.pathMeta = out.meta;
    this.pathDepth = depth;
  }

  /** Commit a custom hero at a path position; the service rebuilds every
   * downstream step from the overridden state. */
  async overrideStep(pos: number, hero: number): Promise<void> {
    if (!this.session) throw new Error('no session');
    const cursorPos = pos - this.session.cursor;
    if (cursorPos < 0 || cursorPos >= this.pathDepth) {
      throw new Error(`position ${pos} is not part of the previewed path`);
    }
    this.overrides = { ...this.overrides, [String(cursorPos)]: hero };
    await this.requestPath(this.pathDepth);
  }

  /** Pin the current full-round path into the comparison panel. */
  async pinCurrentPath(): Promise<void> {
    if (!this.session || !this.path) throw new Error('no path to pin');
    if (this.path.steps.length < this.remaining) {
      throw new Error('extend the path to the round end before pinning');
    }
    const committed = this.session.committed
      .filter((c) => c.type === 'step')
      .map((c) => c.hero as number);
    const plan = [...committed, ...this.path.steps.map((s) => s.hero)];
    const rev = this.bump();
    const plans = [...this.pinnedPlans, plan];
    const out = await this.api.compare({
      session_id: this.session.session_id,
      drafts: plans,
      samples: this.options.samples,
      seed: this.options.seed,
    });
    if (!this.fresh(rev)) return;
    this.pinnedPlans = plans;
    this.pinned = plans.map((p, i) => ({ plan: p, row: out.result.rows[i] }));
  }
}
