/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_boxsolution_free: (a: number, b: number) => void;
export const __wbg_pcgphistories_free: (a: number, b: number) => void;
export const boxsolution_criteria: (a: number) => [number, number];
export const boxsolution_criterion_steps: (a: number) => [number, number];
export const boxsolution_displacement: (a: number) => [number, number];
export const boxsolution_nodes: (a: number) => [number, number];
export const boxsolution_pcgp_iterations: (a: number) => number;
export const boxsolution_plastic: (a: number) => [number, number];
export const boxsolution_tets: (a: number) => [number, number];
export const boxsolution_von_mises: (a: number) => [number, number];
export const pcgp_histories: (a: number, b: number, c: number) => [number, number, number];
export const pcgphistories_dirichlet: (a: number) => [number, number];
export const pcgphistories_lumped: (a: number) => [number, number];
export const pcgphistories_none: (a: number) => [number, number];
export const solve_box: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const uniaxial_response: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
