// Pure view model: everything the DOM layer shows, computed from state.
// Keeping this free of DOM types makes the rendering rules testable as
// plain functions.

import { TABS, Tab, ViewState, syncLabel, visibleProducts } from './state.js'

export interface TabVM {
  id: Tab
  label: string
  active: boolean
}

export interface ProductRowVM {
  id: number
  name: string
  price: string
  favorite: boolean
  categoryName: string
}

export interface ListRowVM {
  id: number
  label: string
  color: string // 'red' or 'green', straight from the bought flag
  bought: boolean
}

export interface ViewModel {
  tabs: TabVM[]
  categoryNames: string[]
  productRows: ProductRowVM[]
  favoritesOnly: boolean
  listRows: ListRowVM[]
  formError: string | null
  notice: string | null
  syncButton: string
}

const LABELS: Record<Tab, string> = {
  category: 'Category',
  product: 'Product',
  new: 'New',
  list: 'List',
}

export function view(state: ViewState): ViewModel {
  const byId = new Map(state.categories.map((c) => [c.id, c.name]))
  return {
    tabs: TABS.map((id) => ({ id, label: LABELS[id], active: id === state.activeTab })),
    categoryNames: state.categories.map((c) => c.name),
    productRows: visibleProducts(state).map((p) => ({
      id: p.id,
      name: p.name,
      price: p.price,
      favorite: p.is_favorite,
      categoryName: p.category_id === null ? '' : (byId.get(p.category_id) ?? ''),
    })),
    favoritesOnly: state.favoritesOnly,
    listRows: state.list.map((e) => ({
      id: e.id,
      label: `${e.product_name} (${e.price})`,
      color: e.bought ? 'green' : 'red',
      bought: e.bought,
    })),
    formError: state.formError,
    notice: state.notice,
    syncButton: syncLabel(state.syncStatus),
  }
}
