/** Wire types for the session service's JSON payloads. */

export interface ClusterSummary {
  id: number;
  node: number;
  hue_deg: number;
  pinned: boolean;
  line_count: number;
  bin_count: number;
}

export interface PipelineParams {
  min_density: number;
  k: number;
  metric: string;
  log_scale: boolean;
  template: string;
}

export interface StateSummary {
  session: string;
  revision: number;
  params: PipelineParams;
  grid: { width: number; height: number };
  n_lines: number;
  n_unassigned: number;
  clusters: ClusterSummary[];
  dendrogram: { n_leaves: number; linkage: string; merges: number[][] };
}

export interface LineGeometry {
  id: number;
  points: [number, number][];
}

export interface LinesPayload {
  cluster: number | "unassigned";
  count: number;
  lines: LineGeometry[];
}

export type ClusterSelector = number | "unassigned";
