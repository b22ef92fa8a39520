// Wire types for the explorer service (see the package README for the API).

export type Task = "classification" | "regression";

export interface Meta {
  task: Task;
  n: number;
  p: number;
  name: string;
  feature_names: string[];
  color_statistics: string[];
  levels: string[] | null;
  default_angle_step: number;
}

export interface GlobalRecord {
  index: number;
  label: string;
  data_pc1: number;
  data_pc2: number;
  attr_pc1: number;
  attr_pc2: number;
  observed: number;
  predicted: number;
  color: number;
  misclassified?: boolean;
}

export interface GlobalPayload {
  color: string;
  variance_explained: { data: number[]; attribution: number[] };
  records: GlobalRecord[];
}

export interface TourFrame {
  angle: number;
  basis: number[];
  scores: number[];
}

export interface TourResponse {
  pi_index: number;
  manip_var: number;
  explained_target: string;
  frames: TourFrame[];
  waypoints: { start: number; full: number; zero: number; return: number };
  axis_range: [number, number];
}

export interface TourRequest {
  pi_index: number;
  manip_var: number;
  include?: number[];
  angle_step?: number;
  basis_override?: number[];
}

export interface AttributionsPayload {
  target: string;
  baseline: number;
  normalized: number[][];
  zero_rows: boolean[];
}

export interface ObsDetail {
  index: number;
  label: string;
  features: Record<string, number>;
  scaled: number[];
  observed: number;
  predicted: number;
  attribution: number[];
  attribution_normalized: number[];
  attribution_zero: boolean;
  baseline: number;
  attribution_target: string;
  observed_label?: string;
  predicted_label?: string;
  class_probs?: number[];
  misclassified?: boolean;
  residual?: number;
}

export interface SelectionRow {
  index: number;
  label: string;
  observed: number;
  predicted: number;
  features: Record<string, number>;
  [statistic: string]: unknown;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
